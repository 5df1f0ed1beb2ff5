//! Extensions across boundaries: by zero for `s < 1/2`, by the two-term
//! reflection `-3 u(x1, -x2) + 4 u(x1, -x2/2)` across a flat side, through
//! the straightening map of a graph boundary, and the assembled operator `E`
//! on model domains.

mod operator;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{Curve, GraphDomain2D, GraphKind, Grid, Grid2D, Interval, Point, Region, SampledFunction};
use crate::error::{Error, Result};
use crate::hardy::InequalityReport;
use crate::norms::{gagliardo_sq, sobolev_norm, whole_space_gagliardo_sq, SmoothnessIndex};
use crate::numeric::neumaier_sum;

pub use operator::{extend_e, ExtensionModel, ExtensionOperator, CHART_HALF_WIDTH, DEFAULT_PATCHES, DILATION};

/// Weights of the reflected samples `u(x1, -x2)` and `u(x1, -x2/2)`.
pub const VALUE_WEIGHTS: [f64; 2] = [-3.0, 4.0];
/// Weights of `d2 u` at the same points, `-DILATIONS[k] * VALUE_WEIGHTS[k]`.
pub const NORMAL_DERIV_WEIGHTS: [f64; 2] = [3.0, -2.0];
pub const DILATIONS: [f64; 2] = [1.0, 0.5];

/// Pointwise rounding tolerance for "vanishes", relative to `max |u|`.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `psi(x) = (x1, x2 - g(x1))` and its inverse `phi(y) = (y1, y2 + g(y1))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StraighteningMap {
    pub curve: Curve,
}

impl StraighteningMap {
    pub fn new(curve: Curve) -> Self {
        Self { curve }
    }

    pub fn forward(&self, x: Point) -> Point {
        [x[0], x[1] - self.curve.value(x[0])]
    }

    pub fn inverse(&self, y: Point) -> Point {
        [y[0], y[1] + self.curve.value(y[0])]
    }

    /// Jacobian of `phi` at `y`, row-major.
    pub fn inverse_jacobian(&self, y: Point) -> [[f64; 2]; 2] {
        [[1.0, 0.0], [self.curve.deriv(y[0]), 1.0]]
    }

    pub fn jacobian_det(&self, y: Point) -> f64 {
        let j = self.inverse_jacobian(y);
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }
}

/// An extended field together with the measured norm ratios.
#[derive(Debug, Clone)]
pub struct ExtensionResult {
    /// The extension on the enlarged grid.
    pub field: SampledFunction,
    /// `||ext||_{H^s} / ||input||_{H^s}` (extension by zero).
    pub norm_ratio: Option<f64>,
    pub norm_ratio_h1: Option<f64>,
    /// `||d ext||_{H^s} / ||d input||_{H^s}` with `||.||_{H^s} = ||.||_2 + |.|_s`.
    pub norm_ratio_hs_grad: Option<f64>,
    /// `[x0, x1, y0, y1]`; the extension vanishes outside.
    pub support_box: [f64; 4],
    /// Resolution of the input grid.
    pub n: usize,
    /// `max |ext - input|` over the input's active nodes.
    pub restriction_error: f64,
}

/// Serialized form of an [`ExtensionResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionSummary {
    pub norm_ratio_h1: Option<f64>,
    pub norm_ratio_hs_grad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_ratio: Option<f64>,
    pub support_box: [f64; 4],
    pub n: usize,
}

impl ExtensionResult {
    pub fn summary(&self) -> ExtensionSummary {
        ExtensionSummary {
            norm_ratio_h1: self.norm_ratio_h1,
            norm_ratio_hs_grad: self.norm_ratio_hs_grad,
            norm_ratio: self.norm_ratio,
            support_box: self.support_box,
            n: self.n,
        }
    }

    /// Point cloud `x1,x2,value` (or `x,value` in 1D) over the active nodes.
    pub fn to_csv(&self) -> String {
        let g = self.field.grid();
        let mut out = String::from(if g.dim() == 1 { "x,value\n" } else { "x1,x2,value\n" });
        for (p, v) in g.points().iter().zip(self.field.values()) {
            if g.dim() == 1 {
                out.push_str(&format!("{:e},{:e}\n", p[0], v));
            } else {
                out.push_str(&format!("{:e},{:e},{:e}\n", p[0], p[1], v));
            }
        }
        out
    }
}

pub(crate) fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

pub(crate) fn h1_norm(f: &SampledFunction) -> Result<f64> {
    Ok((f.l2_norm_sq() + f.gradient_l2_norm_sq()?).sqrt())
}

/// `||df||_2 + (sum_c |d_c f|_gamma^2)^{1/2}`, the Gagliardo part over the
/// grid domain or over the whole space for `f` extended by zero.
pub(crate) fn gradient_hs_norm(f: &SampledFunction, gamma: f64, whole_space: bool) -> Result<f64> {
    let l2 = f.gradient_l2_norm_sq()?.sqrt();
    let mut frac = 0.0;
    for c in 0..f.dim() {
        let comp = f.gradient_component(c)?;
        frac += if whole_space { whole_space_gagliardo_sq(&comp, gamma)? } else { gagliardo_sq(&comp, gamma)? }.value_sq;
    }
    Ok(l2 + frac.sqrt())
}

fn check_below_half(s: f64) -> Result<()> {
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("s must be positive, got {s}")));
    }
    if s >= 0.5 {
        return Err(Error::Unsupported(format!("extension by zero needs s < 1/2, got {s}")));
    }
    Ok(())
}

/// Extends `g` by zero to a grid enlarged by half the domain length on each
/// side (1D) or to the 1.25x dilated bounding box (2D).
pub fn zero_extend(g: &SampledFunction, s: f64) -> Result<ExtensionResult> {
    check_below_half(s)?;
    let index = SmoothnessIndex::new(s)?;
    let (field, support_box) = match g.grid() {
        Grid::One(grid) => {
            let pad = grid.n.div_ceil(2);
            let (big, off) = grid.padded(pad);
            let mut values = vec![0.0; big.n];
            values[off..off + grid.n].copy_from_slice(g.values());
            (SampledFunction::new(big, values)?, [grid.interval.a, grid.interval.b, 0.0, 0.0])
        }
        Grid::Two(grid) => {
            let (x0, x1, y0, y1) = (grid.x.a, grid.x.b, grid.y.a, grid.y.b);
            let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            let (rx, ry) = (0.5 * DILATION * (x1 - x0), 0.5 * DILATION * (y1 - y0));
            let (big, il, jl) = grid.aligned_cover(cx - rx, cx + rx, cy - ry, cy + ry, Region::Box)?;
            let mut values = vec![0.0; big.active_count()];
            for (r, &idx) in grid.active().iter().enumerate() {
                let (i, j) = (idx % grid.nx, idx / grid.nx);
                values[(j + jl) * big.nx + i + il] = g.values()[r];
            }
            (SampledFunction::new(big, values)?, [x0, x1, y0, y1])
        }
    };
    let inner = sobolev_norm(g, index)?.value;
    let outer = sobolev_norm(&field, index)?.value;
    Ok(ExtensionResult {
        field,
        norm_ratio: ratio(outer, inner),
        norm_ratio_h1: None,
        norm_ratio_hs_grad: None,
        support_box,
        n: g.grid().resolution(),
        restriction_error: 0.0,
    })
}

/// Linear interpolation along grid columns (fixed `x1`), used wherever a map
/// moves points only in `x2`.
pub(crate) struct Columns<'a> {
    grid: &'a Grid2D,
    spans: Vec<Option<(usize, usize)>>,
}

impl<'a> Columns<'a> {
    pub(crate) fn new(grid: &'a Grid2D) -> Result<Self> {
        let mut spans = Vec::with_capacity(grid.nx);
        for i in 0..grid.nx {
            let rows: Vec<usize> = (0..grid.ny).filter(|&j| grid.rank_of(i, j).is_some()).collect();
            let span = match (rows.first(), rows.last()) {
                (Some(&lo), Some(&hi)) => {
                    if hi - lo + 1 != rows.len() {
                        return Err(Error::Domain(format!("grid column {i} is not contiguous")));
                    }
                    Some((lo, hi))
                }
                _ => None,
            };
            spans.push(span);
        }
        Ok(Self { grid, spans })
    }

    pub(crate) fn has_nodes(&self, i: usize) -> bool {
        self.spans[i].is_some()
    }

    /// Value at height `x2` in column `i`, extrapolating linearly up to
    /// `reach` cells past the active span; `None` beyond.
    pub(crate) fn at(&self, vals: &[f64], i: usize, x2: f64, reach: f64) -> Option<f64> {
        let (lo, hi) = self.spans[i]?;
        let t = (x2 - self.grid.y.a) / self.grid.h2() - 0.5;
        if t < lo as f64 - reach || t > hi as f64 + reach {
            return None;
        }
        let v = |j: usize| vals[self.grid.rank_of(i, j).unwrap()];
        if lo == hi {
            return Some(v(lo));
        }
        let nearest = t.round();
        if (t - nearest).abs() < 1e-9 && nearest >= lo as f64 && nearest <= hi as f64 {
            return Some(v(nearest as usize));
        }
        let j0 = (t.floor().max(lo as f64) as usize).min(hi - 1);
        let frac = t - j0 as f64;
        Some((1.0 - frac) * v(j0) + frac * v(j0 + 1))
    }
}

fn graph_parts(u: &SampledFunction, kind: GraphKind) -> Result<(&Grid2D, &GraphDomain2D)> {
    let Grid::Two(g) = u.grid() else {
        return Err(Error::Input("a 2D sampled function is required".into()));
    };
    match &g.region {
        Region::Graph(d) if d.kind == kind => Ok((g, d)),
        _ => Err(Error::Input(format!("samples must live on a {kind:?} graph domain"))),
    }
}

fn qplus_parts(u: &SampledFunction) -> Result<(&Grid2D, &GraphDomain2D)> {
    let (g, d) = graph_parts(u, GraphKind::QPlus)?;
    if g.y.a != 0.0 {
        return Err(Error::Input(format!("Q+ grids must start at x2 = 0, got {}", g.y.a)));
    }
    Ok((g, d))
}

/// Reflection core: the compact core `K` intersected with
/// `x2 < f(x1)/2 - margin`, so both reflected samples stay inside `Q`.
fn in_reflection_core(d: &GraphDomain2D, p: Point) -> bool {
    d.in_core(p) && p[1] < 0.5 * d.upper.value(p[0]) - d.core_margin
}

fn check_reflection_support(u: &SampledFunction, g: &Grid2D, d: &GraphDomain2D) -> Result<()> {
    if !(d.core_margin > 0.0) {
        return Err(Error::Precondition(format!("core margin must be positive, got {}", d.core_margin)));
    }
    let tol = SUPPORT_TOL * u.max_abs();
    for (p, v) in g.active_points().iter().zip(u.values()) {
        if v.abs() > tol && !in_reflection_core(d, *p) {
            return Err(Error::Precondition(format!(
                "u = {v:.3e} at ({:.4}, {:.4}) outside the reflection core",
                p[0], p[1]
            )));
        }
    }
    Ok(())
}

/// The reflected field on the doubled box `x-range x (-H, H)` of a `Q+`
/// grid, without the support precondition. Reflected samples come from
/// column interpolation; values past the top of a column count as zero.
pub fn reflect_values(u: &SampledFunction) -> Result<SampledFunction> {
    let (g, d) = qplus_parts(u)?;
    let cols = Columns::new(g)?;
    let (nx, ny) = (g.nx, g.ny);
    let out = Grid2D::new(g.x, Interval::new(-g.y.b, g.y.b)?, nx, 2 * ny, Region::Box)?;
    let grad = u.gradient();
    let total = nx * 2 * ny;
    let mut vals = Vec::with_capacity(total);
    let mut gx = Vec::with_capacity(total);
    let mut gy = Vec::with_capacity(total);
    for j in 0..2 * ny {
        for i in 0..nx {
            if j >= ny {
                let r = g.rank_of(i, j - ny);
                vals.push(r.map_or(0.0, |r| u.values()[r]));
                if let Some(gr) = grad {
                    gx.push(r.map_or(0.0, |r| gr[0][r]));
                    gy.push(r.map_or(0.0, |r| gr[1][r]));
                }
                continue;
            }
            let p = out.node(i, j);
            let t = -p[1];
            if !d.base.contains(p[0]) || t >= d.upper.value(p[0]) {
                vals.push(0.0);
                if grad.is_some() {
                    gx.push(0.0);
                    gy.push(0.0);
                }
                continue;
            }
            let at = |field: &[f64], k: usize| cols.at(field, i, DILATIONS[k] * t, 1.0).unwrap_or(0.0);
            vals.push((0..2).map(|k| VALUE_WEIGHTS[k] * at(u.values(), k)).sum());
            if let Some(gr) = grad {
                gx.push((0..2).map(|k| VALUE_WEIGHTS[k] * at(&gr[0], k)).sum());
                gy.push((0..2).map(|k| NORMAL_DERIV_WEIGHTS[k] * at(&gr[1], k)).sum());
            }
        }
    }
    let f = SampledFunction::new(out, vals)?;
    if grad.is_some() {
        f.with_gradient(vec![gx, gy])
    } else {
        Ok(f)
    }
}

/// Two-term reflection of `u` (vanishing off the reflection core) across
/// `x2 = 0`, with the `H^1` ratio and the ratio of gradient `H^s` norms,
/// whole space over `Q+`, at fractional order `s`.
pub fn hestenes_reflect(u: &SampledFunction, s: f64) -> Result<ExtensionResult> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("fractional order must lie in (0, 1), got {s}")));
    }
    let (g, d) = qplus_parts(u)?;
    check_reflection_support(u, g, d)?;
    u.require_gradient()?;
    let field = reflect_values(u)?;
    let norm_ratio_h1 = ratio(h1_norm(&field)?, h1_norm(u)?);
    let norm_ratio_hs_grad = ratio(gradient_hs_norm(&field, s, true)?, gradient_hs_norm(u, s, false)?);
    Ok(ExtensionResult {
        field,
        norm_ratio: None,
        norm_ratio_h1,
        norm_ratio_hs_grad,
        support_box: [g.x.a, g.x.b, -g.y.b, g.y.b],
        n: g.nx,
        restriction_error: 0.0,
    })
}

/// Continuity across `x2 = 0` of a reflected field on the doubled box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceMismatch {
    /// Largest gap between the one-sided linear extrapolations to `x2 = 0`.
    pub value: f64,
    /// Largest gap between the one-sided first differences in `x2`.
    pub slope: f64,
    pub h: f64,
}

pub fn interface_mismatch(field: &SampledFunction) -> Result<InterfaceMismatch> {
    let Grid::Two(g) = field.grid() else {
        return Err(Error::Input("a 2D field is required".into()));
    };
    if g.region != Region::Box || g.ny % 2 != 0 || g.ny < 4 || g.y.a != -g.y.b {
        return Err(Error::Input("expected a full box symmetric about x2 = 0".into()));
    }
    let m = g.ny / 2;
    let h = g.h2();
    let v = |i: usize, j: usize| field.values()[j * g.nx + i];
    let mut value = 0.0f64;
    let mut slope = 0.0f64;
    for i in 0..g.nx {
        let above = 1.5 * v(i, m) - 0.5 * v(i, m + 1);
        let below = 1.5 * v(i, m - 1) - 0.5 * v(i, m - 2);
        value = value.max((above - below).abs());
        let da = (v(i, m + 1) - v(i, m)) / h;
        let db = (v(i, m - 1) - v(i, m - 2)) / h;
        slope = slope.max((da - db).abs());
    }
    Ok(InterfaceMismatch { value, slope, h })
}

/// Cross-kernel bound: `sum_{x, y in Q+} |g(y)|^2 / (|x1 - y1| + x2 + y2)^(2 + 2s)`
/// against `||g||^2_{H^s(Q+)}`, verdict against `c_max`.
pub fn cross_kernel_check(g: &SampledFunction, s: f64, c_max: f64, family_id: &str) -> Result<InequalityReport> {
    check_below_half(s)?;
    let (grid, d) = qplus_parts(g)?;
    check_reflection_support(g, grid, d)?;
    let pts = grid.active_points();
    let area = grid.cell_area();
    let q = 1.0 + s;
    let support: Vec<(Point, f64)> = pts
        .iter()
        .zip(g.values())
        .filter(|(_, v)| **v != 0.0)
        .map(|(p, v)| (*p, v * v))
        .collect();
    let terms: Vec<f64> = support
        .par_iter()
        .map(|(y, g2)| {
            let k = neumaier_sum(pts.iter().map(|x| {
                let r = (x[0] - y[0]).abs() + x[1] + y[1];
                (r * r).powf(-q)
            }));
            g2 * k
        })
        .collect();
    let lhs = neumaier_sum(terms) * area * area;
    let rhs = sobolev_norm(g, SmoothnessIndex::new(s)?)?.value_sq;
    Ok(InequalityReport::upper(lhs, rhs, c_max, grid.nx, family_id))
}

/// The straightened domain `W = psi(Omega)` of a disk-capped graph domain.
pub fn straightened_domain(d: &GraphDomain2D) -> Result<GraphDomain2D> {
    if d.kind != GraphKind::DiskCap {
        return Err(Error::Input("straightening needs a disk-capped graph domain".into()));
    }
    Ok(GraphDomain2D {
        kind: GraphKind::QPlus,
        base: d.base,
        lower: Curve::flat(),
        upper: d.upper.clone().minus(d.lower.clone()),
        r0: None,
        core_margin: d.core_margin,
    })
}

/// Pulls `u` on a disk-capped graph domain back to `W`: `v(y) = u(phi(y))`,
/// `dv = (du)(phi(y)) dphi(y)`. The `W` grid shares the columns and spacing
/// of the source grid; columns without source nodes are left out.
pub fn straighten(u: &SampledFunction) -> Result<SampledFunction> {
    let (g, d) = graph_parts(u, GraphKind::DiskCap)?;
    let map = StraighteningMap::new(d.lower.clone());
    let w = straightened_domain(d)?;
    let cols = Columns::new(g)?;
    let h2 = g.h2();
    let height = w.bounding_box()[3];
    let ny = ((height / h2).ceil() as usize).max(1);
    let wg = Grid2D::new_filtered(g.x, Interval::new(0.0, ny as f64 * h2)?, g.nx, ny, Region::Graph(w), |i, _| cols.has_nodes(i))?;
    transport(u, &wg, &cols, |y| map.inverse(y), |y| map.curve.deriv(y[0]))
}

/// Pushes `v` on the straightened grid back to the grid `target` of the
/// disk-capped domain: `u(x) = v(psi(x))`.
pub fn unstraighten(v: &SampledFunction, target: &Grid2D) -> Result<SampledFunction> {
    let Grid::Two(wg) = v.grid() else {
        return Err(Error::Input("a 2D sampled function is required".into()));
    };
    let Region::Graph(d) = &target.region else {
        return Err(Error::Input("target grid must carry a disk-capped graph domain".into()));
    };
    if d.kind != GraphKind::DiskCap || wg.x != target.x || wg.nx != target.nx {
        return Err(Error::Input("target grid must share the columns of the straightened grid".into()));
    }
    let map = StraighteningMap::new(d.lower.clone());
    let cols = Columns::new(wg)?;
    transport(v, target, &cols, |x| map.forward(x), |x| -map.curve.deriv(x[0]))
}

/// Samples `src` at `to(p)` for each active node `p` of `dst` (same column),
/// moving the gradient with the shear `d1 += slope * d2`.
fn transport(
    src: &SampledFunction,
    dst: &Grid2D,
    cols: &Columns,
    to: impl Fn(Point) -> Point,
    slope: impl Fn(Point) -> f64,
) -> Result<SampledFunction> {
    let grad = src.gradient();
    let n = dst.active_count();
    let mut vals = Vec::with_capacity(n);
    let mut gx = Vec::with_capacity(n);
    let mut gy = Vec::with_capacity(n);
    for &idx in dst.active() {
        let i = idx % dst.nx;
        let p = dst.node_of_index(idx);
        let q = to(p);
        let miss = || Error::Domain(format!("({:.4}, {:.4}) maps outside the source grid", p[0], p[1]));
        vals.push(cols.at(src.values(), i, q[1], 1.0).ok_or_else(miss)?);
        if let Some(gr) = grad {
            let a = cols.at(&gr[0], i, q[1], 1.0).ok_or_else(miss)?;
            let b = cols.at(&gr[1], i, q[1], 1.0).ok_or_else(miss)?;
            gx.push(a + slope(p) * b);
            gy.push(b);
        }
    }
    let f = SampledFunction::new(dst.clone(), vals)?;
    if grad.is_some() {
        f.with_gradient(vec![gx, gy])
    } else {
        Ok(f)
    }
}
