use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gradient_hs_norm, h1_norm, ratio, DILATIONS, SUPPORT_TOL, VALUE_WEIGHTS};
use crate::domains::{Field, GraphDomain2D, GraphKind, Grid2D, Interval, Point, Region, SampledFunction};
use crate::error::{Error, Result};
use crate::numeric::{smoothstep, smoothstep_deriv};

pub const DEFAULT_PATCHES: usize = 8;
/// Charts of the disk use `|z1| < CHART_HALF_WIDTH` in tangential coordinates.
pub const CHART_HALF_WIDTH: f64 = 0.9;
/// `V` is this dilation of the domain's bounding box.
pub const DILATION: f64 = 1.25;

const INTERIOR_FULL: f64 = 0.6;
const INTERIOR_ZERO: f64 = 0.8;
const TRUNCATION_FULL: f64 = 1.05;
const TRUNCATION_ZERO: f64 = 1.2;

/// Domain on which `E` is assembled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ExtensionModel {
    /// Unit disk: interior cutoff plus `patches` boundary charts.
    UnitDisk { patches: usize },
    /// Disk-capped graph domain, one chart; inputs must vanish off the core.
    CappedGraph { domain: GraphDomain2D },
}

impl ExtensionModel {
    pub fn unit_disk() -> Self {
        ExtensionModel::UnitDisk { patches: DEFAULT_PATCHES }
    }
}

/// `1 - smoothstep((x - full) / (zero - full))` with its derivative in `x`.
fn falloff(x: f64, full: f64, zero: f64) -> (f64, f64) {
    let w = zero - full;
    let t = (x - full) / w;
    (1.0 - smoothstep(t), -smoothstep_deriv(t) / w)
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy)]
struct Chart {
    theta: f64,
    /// Outward normal at the chart centre.
    n: Point,
    /// Tangent, `n` rotated by a quarter turn.
    t: Point,
}

/// Local graph `z2 = 1 - sqrt(1 - z1^2)` of the unit circle.
fn circle_graph(z1: f64) -> (f64, f64) {
    let r = (1.0 - z1 * z1).sqrt();
    (1.0 - r, z1 / r)
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

enum Layout {
    Disk { charts: Vec<Chart>, spacing: f64 },
    Capped { domain: GraphDomain2D, depth: f64 },
}

/// The extension `Ef` of a field `f` as a pointwise [`Field`].
pub struct ExtensionOperator<'a> {
    f: &'a dyn Field,
    layout: Layout,
}

impl<'a> ExtensionOperator<'a> {
    pub fn new(f: &'a dyn Field, model: &ExtensionModel) -> Result<Self> {
        let layout = match model {
            ExtensionModel::UnitDisk { patches } => {
                let p = *patches;
                let spacing = TAU / p.max(1) as f64;
                // a patch spans |theta - theta_j| < spacing; its chart must hold it
                if p < 2 || spacing >= FRAC_PI_2 || spacing.sin() >= CHART_HALF_WIDTH {
                    return Err(Error::Configuration(format!(
                        "{p} boundary patches do not fit the charts |z1| < {CHART_HALF_WIDTH}"
                    )));
                }
                let charts = (0..p)
                    .map(|j| {
                        let theta = spacing * j as f64;
                        let (s, c) = theta.sin_cos();
                        Chart { theta, n: [c, s], t: [-s, c] }
                    })
                    .collect();
                Layout::Disk { charts, spacing }
            }
            ExtensionModel::CappedGraph { domain } => {
                if domain.kind != GraphKind::DiskCap {
                    return Err(Error::Configuration("the single-chart model needs a disk-capped graph domain".into()));
                }
                let r0 = domain.r0.ok_or_else(|| Error::Configuration("disk-capped domain without r0".into()))?;
                let m = domain.core_margin;
                let (a, b) = (domain.base.a + m, domain.base.b - m);
                if !(a < b) {
                    return Err(Error::Configuration("core margin leaves no core columns".into()));
                }
                // room below the curve before the lower circle, over the core columns
                let room = (0..=1000)
                    .map(|k| {
                        let x = a + (b - a) * k as f64 / 1000.0;
                        domain.lower.value(x) + (r0 * r0 - x * x).max(0.0).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min);
                if !(room > 0.0) {
                    return Err(Error::Configuration("no room below the boundary curve inside B(0, r0)".into()));
                }
                Layout::Capped { domain: domain.clone(), depth: 0.25 * room }
            }
        };
        Ok(Self { f, layout })
    }

    /// `(Ef, grad Ef)` at `x`.
    pub fn eval(&self, x: Point) -> (f64, Point) {
        match &self.layout {
            Layout::Disk { charts, spacing } => self.eval_disk(x, charts, *spacing),
            Layout::Capped { domain, depth } => self.eval_capped(x, domain, *depth),
        }
    }

    /// Partition weight of patch `j` with its gradient.
    fn patch_weight(x: Point, chart: &Chart, spacing: f64) -> (f64, Point) {
        let r = x[0].hypot(x[1]);
        let a = wrap(x[1].atan2(x[0]) - chart.theta);
        let u = 1.0 - a.abs() / spacing;
        if u <= 0.0 || r <= INTERIOR_FULL {
            return (0.0, [0.0, 0.0]);
        }
        let (chi, dchi) = falloff(r, INTERIOR_FULL, INTERIOR_ZERO);
        let psi = smoothstep(u);
        let dpsi = -smoothstep_deriv(u) * a.signum() / spacing;
        let rhat = [x[0] / r, x[1] / r];
        let dtheta = [-x[1] / (r * r), x[0] / (r * r)];
        let w = (1.0 - chi) * psi;
        let g = [
            -dchi * rhat[0] * psi + (1.0 - chi) * dpsi * dtheta[0],
            -dchi * rhat[1] * psi + (1.0 - chi) * dpsi * dtheta[1],
        ];
        (w, g)
    }

    /// Patch piece `w_j f` with its gradient.
    fn piece(&self, x: Point, chart: &Chart, spacing: f64) -> (f64, Point) {
        let (w, dw) = Self::patch_weight(x, chart, spacing);
        if w == 0.0 && dw == [0.0, 0.0] {
            return (0.0, [0.0, 0.0]);
        }
        let v = self.f.value(x);
        let g = self.f.gradient(x);
        (w * v, [w * g[0] + v * dw[0], w * g[1] + v * dw[1]])
    }

    fn eval_disk(&self, x: Point, charts: &[Chart], spacing: f64) -> (f64, Point) {
        let r = x[0].hypot(x[1]);
        if r < 1.0 {
            // sum of the partition weights, kept explicit
            let (chi, dchi) = falloff(r, INTERIOR_FULL, INTERIOR_ZERO);
            let mut w = chi;
            let mut dw = if r > 0.0 { [dchi * x[0] / r, dchi * x[1] / r] } else { [0.0, 0.0] };
            for c in charts {
                let (pw, pg) = Self::patch_weight(x, c, spacing);
                w += pw;
                dw[0] += pg[0];
                dw[1] += pg[1];
            }
            let v = self.f.value(x);
            let g = self.f.gradient(x);
            return (w * v, [w * g[0] + v * dw[0], w * g[1] + v * dw[1]]);
        }
        if r >= TRUNCATION_ZERO {
            return (0.0, [0.0, 0.0]);
        }
        let mut sum = 0.0;
        let mut grad = [0.0, 0.0];
        for c in charts {
            let z1 = dot(c.t, x);
            let z2 = 1.0 - dot(c.n, x);
            if z1.abs() >= CHART_HALF_WIDTH {
                continue;
            }
            let (gam, dgam) = circle_graph(z1);
            if z2 >= gam {
                continue;
            }
            let (mut e1, mut e2) = (0.0, 0.0);
            let mut val = 0.0;
            for k in 0..2 {
                let zk = gam + DILATIONS[k] * (gam - z2);
                let p = [c.n[0] * (1.0 - zk) + c.t[0] * z1, c.n[1] * (1.0 - zk) + c.t[1] * z1];
                let (pv, pg) = self.piece(p, c, spacing);
                let p1 = dot(c.t, pg);
                let p2 = -dot(c.n, pg);
                val += VALUE_WEIGHTS[k] * pv;
                e1 += VALUE_WEIGHTS[k] * (p1 + (1.0 + DILATIONS[k]) * dgam * p2);
                e2 += VALUE_WEIGHTS[k] * (-DILATIONS[k]) * p2;
            }
            sum += val;
            grad[0] += c.t[0] * e1 - c.n[0] * e2;
            grad[1] += c.t[1] * e1 - c.n[1] * e2;
        }
        let (tr, dtr) = falloff(r, TRUNCATION_FULL, TRUNCATION_ZERO);
        (
            tr * sum,
            [tr * grad[0] + sum * dtr * x[0] / r, tr * grad[1] + sum * dtr * x[1] / r],
        )
    }

    fn eval_capped(&self, x: Point, d: &GraphDomain2D, depth: f64) -> (f64, Point) {
        if d.contains(x) {
            return (self.f.value(x), self.f.gradient(x));
        }
        if !d.base.contains(x[0]) {
            return (0.0, [0.0, 0.0]);
        }
        let gam = d.lower.value(x[0]);
        let dgam = d.lower.deriv(x[0]);
        let below = gam - x[1];
        if below < 0.0 || below >= 2.0 * depth {
            return (0.0, [0.0, 0.0]);
        }
        let (mut val, mut e1, mut e2) = (0.0, 0.0, 0.0);
        for k in 0..2 {
            let p = [x[0], gam + DILATIONS[k] * below];
            if !d.contains(p) {
                continue;
            }
            let v = self.f.value(p);
            let g = self.f.gradient(p);
            val += VALUE_WEIGHTS[k] * v;
            e1 += VALUE_WEIGHTS[k] * (g[0] + (1.0 + DILATIONS[k]) * dgam * g[1]);
            e2 += VALUE_WEIGHTS[k] * (-DILATIONS[k]) * g[1];
        }
        let (tr, dtr) = falloff(below, depth, 2.0 * depth);
        // d(below)/dx = (dgam, -1)
        (val * tr, [tr * e1 + val * dtr * dgam, tr * e2 - val * dtr])
    }

    /// The box `V` containing the support of `Ef`.
    pub fn support_box(&self) -> [f64; 4] {
        match &self.layout {
            Layout::Disk { .. } => [-DILATION, DILATION, -DILATION, DILATION],
            Layout::Capped { domain, .. } => {
                let r0 = domain.r0.unwrap_or(1.0);
                [-r0, r0, -r0, r0]
            }
        }
    }

    /// Samples `Ef` with its gradient on the active nodes of `grid`.
    pub fn sample(&self, grid: Grid2D) -> Result<SampledFunction> {
        let pts = grid.active_points();
        let evals: Vec<(f64, Point)> = pts.par_iter().map(|&p| self.eval(p)).collect();
        let values = evals.iter().map(|e| e.0).collect();
        let gx = evals.iter().map(|e| e.1[0]).collect();
        let gy = evals.iter().map(|e| e.1[1]).collect();
        SampledFunction::new(grid, values)?.with_gradient(vec![gx, gy])
    }
}

impl Field for ExtensionOperator<'_> {
    fn value(&self, p: Point) -> f64 {
        self.eval(p).0
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        self.eval(p).1
    }
}

/// Assembles `Ef` for `f` on the model domain at `n x n` resolution over the
/// domain's bounding square, samples it on the aligned grid over `V`, and
/// measures the `H^1` and gradient `H^s` ratios.
pub fn extend_e(f: &dyn Field, model: &ExtensionModel, s: f64, n: usize) -> Result<super::ExtensionResult> {
    super::check_below_half(s)?;
    let op = ExtensionOperator::new(f, model)?;
    let (omega, v_grid, il, jl) = match model {
        ExtensionModel::UnitDisk { .. } => {
            let side = Interval::new(-1.0, 1.0)?;
            let omega = Grid2D::new(side, side, n, n, Region::unit_disk())?;
            let (v, il, jl) = omega.aligned_cover(-DILATION, DILATION, -DILATION, DILATION, Region::Box)?;
            (omega, v, il, jl)
        }
        ExtensionModel::CappedGraph { domain } => {
            let r0 = domain.r0.unwrap_or(1.0);
            let side = Interval::new(-r0, r0)?;
            let omega = Grid2D::new(side, side, n, n, Region::Graph(domain.clone()))?;
            let tol = SUPPORT_TOL * omega.active_points().iter().fold(0.0f64, |m, &p| m.max(f.value(p).abs()));
            if let Some(p) = omega.active_points().into_iter().find(|&p| !domain.in_core(p) && f.value(p).abs() > tol) {
                return Err(Error::Precondition(format!(
                    "f does not vanish off the core at ({:.4}, {:.4})",
                    p[0], p[1]
                )));
            }
            let v = Grid2D::new(side, side, n, n, Region::Box)?;
            (omega, v, 0, 0)
        }
    };
    let input = SampledFunction::from_field(f, omega.clone());
    let field = op.sample(v_grid.clone())?;
    let mut restriction_error = 0.0f64;
    for (r, &idx) in omega.active().iter().enumerate() {
        let (i, j) = (idx % omega.nx, idx / omega.nx);
        let k = v_grid.rank_of(i + il, j + jl).expect("aligned cover keeps every node");
        restriction_error = restriction_error.max((field.values()[k] - input.values()[r]).abs());
    }
    let norm_ratio_h1 = ratio(h1_norm(&field)?, h1_norm(&input)?);
    let norm_ratio_hs_grad = ratio(gradient_hs_norm(&field, s, true)?, gradient_hs_norm(&input, s, false)?);
    Ok(super::ExtensionResult {
        field,
        norm_ratio: None,
        norm_ratio_h1,
        norm_ratio_hs_grad,
        support_box: op.support_box(),
        n,
        restriction_error,
    })
}
