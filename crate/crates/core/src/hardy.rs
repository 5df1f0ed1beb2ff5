//! Hardy-type inequalities on the half-line and on intervals, the kernel
//! `F(k)` behind the super-harmonic weight argument, and the plateau family
//! showing that the interval inequality fails without the boundary term.

use serde::{Deserialize, Serialize};

use crate::domains::{Grid, Grid1D, Interval, SampledFunction, Family, FunctionSpec, sample};
use crate::error::{Error, Result};
use crate::norms::gagliardo_sq;
use crate::numeric::{integrate, integrate_power_tail, neumaier_sum, Neumaier};

const QUAD_TOL: f64 = 1e-13;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Super-harmonic weight `w(x) = x^(-delta)` with `0 < delta < 1 - alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub delta: f64,
    pub alpha: f64,
}

impl WeightFunction {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(delta > 0.0 && delta < 1.0 - alpha) {
            return Err(Error::Parameter(format!("delta must lie in (0, 1 - alpha) = (0, {}), got {delta}", 1.0 - alpha)));
        }
        Ok(Self { delta, alpha })
    }

    pub fn eval(&self, x: f64) -> f64 {
        x.powf(-self.delta)
    }
}

/// `F(k) = int_0^inf (1 - y^-delta) / (k + |1 - y|^2)^((1 + alpha)/2) dy`.
///
/// At `k = 0` the integral is evaluated in the folded form
/// `int_0^1 (1 - y^-delta)(1 - y^(alpha + delta - 1)) / (1 - y)^(1 + alpha) dy`.
pub fn f_kernel(k: f64, alpha: f64, delta: f64) -> Result<f64> {
    WeightFunction::new(alpha, delta)?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Parameter(format!("k must be finite and nonnegative, got {k}")));
    }
    if k == 0.0 {
        return f_kernel_at_zero(alpha, delta);
    }
    let e = 0.5 * (1.0 + alpha);
    let denom = |t: f64| (k + t * t).powf(e);

    // [0, 1/2] with y = t^p, p = 1/(1 - delta), which removes the y^-delta singularity.
    let p = 1.0 / (1.0 - delta);
    let near_zero = integrate(
        |t| {
            let y = t.powf(p);
            if y == 0.0 {
                return -p / denom(1.0);
            }
            // (1 - y^-delta) p t^(p-1) = (y^delta - 1) * p * t^(p - 1) / y^delta, and
            // t^(p-1) / y^delta = 1 exactly for this p.
            (y.powf(delta) - 1.0) * p / denom(1.0 - y)
        },
        0.0,
        0.5f64.powf(1.0 - delta),
        QUAD_TOL,
        QUAD_TOL,
    )?
    .value;

    // (1/2, 3/2) folded about y = 1, so the odd part cancels analytically.
    let fold = |t: f64| {
        let num = -(-delta * (-t).ln_1p()).exp_m1() - (-delta * t.ln_1p()).exp_m1();
        num / denom(t)
    };
    let knee = k.sqrt().min(0.5);
    let middle = integrate(fold, 0.0, knee, QUAD_TOL, QUAD_TOL)?.value + integrate(fold, knee, 0.5, QUAD_TOL, QUAD_TOL)?.value;

    // [3/2, inf): the integrand is flat up to |1 - y| ~ sqrt(k), then decays like y^-(1+alpha).
    let tail_fn = |y: f64| -(-delta * y.ln()).exp_m1() / denom(y - 1.0);
    let split = 1.5 + 4.0 * k.sqrt().max(1.0);
    let tail = integrate(tail_fn, 1.5, split, QUAD_TOL, QUAD_TOL)?.value + integrate_power_tail(tail_fn, split, alpha, QUAD_TOL, QUAD_TOL)?.value;

    Ok(neumaier_sum([near_zero, middle, tail]))
}

fn f_kernel_at_zero(alpha: f64, delta: f64) -> Result<f64> {
    let g = |y: f64| {
        let ly = y.ln();
        let a = -(-delta * ly).exp_m1();
        let b = -((alpha + delta - 1.0) * ly).exp_m1();
        a * b / (1.0 - y).powf(1.0 + alpha)
    };
    // y = t^(1/alpha) on [0, 1/2] absorbs the y^(alpha - 1) endpoint behaviour.
    let q = 1.0 / alpha;
    let head = integrate(
        |t| {
            let y = t.powf(q);
            if y == 0.0 {
                return q;
            }
            g(y) * q * t.powf(q - 1.0)
        },
        0.0,
        0.5f64.powf(alpha),
        QUAD_TOL,
        QUAD_TOL,
    )?
    .value;
    let rest = integrate(g, 0.5, 1.0, QUAD_TOL, QUAD_TOL)?.value;
    Ok(head + rest)
}

/// Standard `k` grid `{0, 1e-6, 1e-5, ..., 1e6}`.
pub fn f_kernel_k_grid() -> Vec<f64> {
    std::iter::once(0.0).chain((-6..=6).map(|e| 10f64.powi(e))).collect()
}

/// `(k, F(k))` over a grid of `k` values, plus the supremum of `|F|`.
pub fn f_kernel_profile(alpha: f64, delta: f64, ks: &[f64]) -> Result<(Vec<(f64, f64)>, f64)> {
    let rows = ks.iter().map(|&k| f_kernel(k, alpha, delta).map(|f| (k, f))).collect::<Result<Vec<_>>>()?;
    let sup = rows.iter().fold(0.0f64, |m, &(_, f)| m.max(f.abs()));
    Ok((rows, sup))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `(u(x) - u(y))^2 >= u(x)^2 (w(x) - w(y)) / w(x) + u(y)^2 (w(y) - w(x)) / w(y)`,
/// compared up to the rounding bound of evaluating both sides in `f64`.
pub fn pointwise_weight_inequality_check(ux: f64, uy: f64, wx: f64, wy: f64) -> Result<PointwiseCheck> {
    if !(wx > 0.0 && wy > 0.0) {
        return Err(Error::Parameter(format!("weights must be positive, got w(x) = {wx}, w(y) = {wy}")));
    }
    let lhs = (ux - uy) * (ux - uy);
    let t1 = ux * ux * (wx - wy) / wx;
    let t2 = uy * uy * (wy - wx) / wy;
    let rhs = t1 + t2;
    let slack = 8.0 * f64::EPSILON * (lhs + t1.abs() + t2.abs() + ux * ux + uy * uy);
    Ok(PointwiseCheck { lhs, rhs, holds: lhs >= rhs - slack })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    PassDegenerate,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

/// Direction of an inequality `lhs >= c * rhs` (lower) or `lhs <= c * rhs` (upper).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    #[default]
    Lower,
    Upper,
}

/// Outcome of checking `lhs >= c * rhs` (or `<=` for upper bounds) on one
/// sampled function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; absent when `rhs = 0`.
    pub empirical_constant: Option<f64>,
    /// The constant the verdict is measured against.
    pub configured_constant: f64,
    pub resolution: usize,
    pub verdict: Verdict,
    pub family_id: String,
    #[serde(default)]
    pub bound: Bound,
}

impl InequalityReport {
    pub(crate) fn new(lhs: f64, rhs: f64, configured_constant: f64, resolution: usize, family_id: &str) -> Self {
        let (empirical_constant, verdict) = if rhs == 0.0 {
            (None, if lhs >= 0.0 { Verdict::PassDegenerate } else { Verdict::Fail })
        } else {
            let c = lhs / rhs;
            let ok = lhs > 0.0 && lhs >= configured_constant * rhs;
            (Some(c), if ok { Verdict::Pass } else { Verdict::Fail })
        };
        Self {
            lhs,
            rhs,
            empirical_constant,
            configured_constant,
            resolution,
            verdict,
            family_id: family_id.to_string(),
            bound: Bound::Lower,
        }
    }

    pub(crate) fn upper(lhs: f64, rhs: f64, configured_constant: f64, resolution: usize, family_id: &str) -> Self {
        let (empirical_constant, verdict) = if rhs == 0.0 {
            (None, if lhs == 0.0 { Verdict::PassDegenerate } else { Verdict::Fail })
        } else {
            let c = lhs / rhs;
            let ok = c.is_finite() && lhs <= configured_constant * rhs;
            (Some(c), if ok { Verdict::Pass } else { Verdict::Fail })
        };
        Self {
            lhs,
            rhs,
            empirical_constant,
            configured_constant,
            resolution,
            verdict,
            family_id: family_id.to_string(),
            bound: Bound::Upper,
        }
    }
}

fn grid_1d(u: &SampledFunction) -> Result<&Grid1D> {
    match u.grid() {
        Grid::One(g) => Ok(g),
        Grid::Two(_) => Err(Error::Input("a 1D sampled function is required".into())),
    }
}

/// `int_l^r x^-alpha dx` for `0 <= l < r`.
fn power_cell(l: f64, r: f64, alpha: f64) -> f64 {
    (r.powf(1.0 - alpha) - l.powf(1.0 - alpha)) / (1.0 - alpha)
}

/// Cell integrals of `x^-alpha` (`a = 0`), exact on each cell.
fn halfline_weights(g: &Grid1D, alpha: f64) -> Vec<f64> {
    let h = g.h();
    (0..g.n).map(|k| power_cell(k as f64 * h, (k + 1) as f64 * h, alpha)).collect()
}

/// Cell integrals of `dist(x, I^c)^-alpha`, exact on each cell.
fn distance_weights(g: &Grid1D, alpha: f64) -> Vec<f64> {
    let (a, b) = (g.interval.a, g.interval.b);
    let m = g.interval.midpoint();
    let h = g.h();
    (0..g.n)
        .map(|k| {
            let l = a + k as f64 * h;
            let r = l + h;
            let left = |lo: f64, hi: f64| power_cell(lo - a, hi - a, alpha);
            let right = |lo: f64, hi: f64| power_cell(b - hi, b - lo, alpha);
            if r <= m {
                left(l, r)
            } else if l >= m {
                right(l, r)
            } else {
                left(l, m) + right(m, r)
            }
        })
        .collect()
}

/// Largest accepted `sup_{x >= 1} x^2 |u(x)|` relative to `max |u|`.
pub const TAIL_DECAY_FACTOR: f64 = 10.0;

/// Half-line Hardy inequality
/// `int int_{(0,inf)^2} (u(x) - u(y))^2 / |x - y|^(1 + alpha) >= c int u^2 / x^alpha`
/// for `u` sampled on `(0, L)` and taken to vanish beyond `L`.
///
/// The left side is the pair sum on `(0, L)` plus the exact contribution
/// `2 int u(x)^2 (L - x)^-alpha / alpha` of pairs with `y > L`. The configured
/// constant is the explicit super-harmonic bound `2 F(0)` for the given `delta`.
pub fn hardy_halfline_check(u: &SampledFunction, alpha: f64, delta: f64, family_id: &str) -> Result<InequalityReport> {
    WeightFunction::new(alpha, delta)?;
    let g = grid_1d(u)?;
    if g.interval.a != 0.0 {
        return Err(Error::Input(format!("half-line samples must start at 0, got {}", g.interval.a)));
    }
    let x = g.nodes();
    let v = u.values();
    let sup = u.max_abs();
    let tail = x.iter().zip(v).filter(|(x, _)| **x >= 1.0).fold(0.0f64, |m, (x, v)| m.max(x * x * v.abs()));
    if tail > TAIL_DECAY_FACTOR * sup {
        return Err(Error::Input(format!(
            "tail decay |u(x)| <= C x^-2 violated: sup x^2 |u| = {tail:.3e} exceeds {TAIL_DECAY_FACTOR} * max|u|"
        )));
    }
    let l = g.interval.b;
    let h = g.h();
    let pairs = if v.len() >= 2 { gagliardo_sq(u, 0.5 * alpha)?.value_sq } else { 0.0 };
    let outside = 2.0 * h * neumaier_sum(x.iter().zip(v).map(|(x, v)| v * v * (l - x).powf(-alpha) / alpha));
    let lhs = pairs + outside;
    let w = halfline_weights(g, alpha);
    let rhs = neumaier_sum(v.iter().zip(&w).map(|(v, w)| v * v * w));
    let bound = 2.0 * f_kernel(0.0, alpha, delta)?;
    Ok(InequalityReport::new(lhs, rhs, bound, g.n, family_id))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum IntervalMode {
    /// `G + beta1 |I|^-alpha ||f||^2 >= beta2 int f^2 / dist^alpha`
    General { beta1: f64, beta2: f64 },
    /// `G >= beta3 int f^2 / dist^alpha` for `int f = 0`
    MeanZero { beta3: f64 },
}

/// Interval Hardy inequality; the report's empirical constant is the largest
/// feasible `beta2` (given `beta1`) or `beta3`.
pub fn interval_hardy_check(f: &SampledFunction, alpha: f64, mode: IntervalMode, family_id: &str) -> Result<InequalityReport> {
    check_alpha(alpha)?;
    let g = grid_1d(f)?;
    let v = f.values();
    let h = g.h();
    let w = distance_weights(g, alpha);
    let rhs = neumaier_sum(v.iter().zip(&w).map(|(v, w)| v * v * w));
    let pairs = if v.len() >= 2 { gagliardo_sq(f, 0.5 * alpha)?.value_sq } else { 0.0 };
    match mode {
        IntervalMode::General { beta1, beta2 } => {
            if !(beta1 >= 0.0 && beta2 >= 0.0) {
                return Err(Error::Parameter("beta1 and beta2 must be nonnegative".into()));
            }
            let lhs = pairs + beta1 * g.interval.len().powf(-alpha) * f.l2_norm_sq();
            Ok(InequalityReport::new(lhs, rhs, beta2, g.n, family_id))
        }
        IntervalMode::MeanZero { beta3 } => {
            let integral = f.integral();
            let l1 = h * v.iter().map(|v| v.abs()).sum::<f64>();
            if integral.abs() >= 1e-8 * l1 {
                return Err(Error::Input(format!("mean-zero mode needs |int f| < 1e-8 ||f||_1, got {integral:.3e} vs {l1:.3e}")));
            }
            Ok(InequalityReport::new(pairs, rhs, beta3, g.n, family_id))
        }
    }
}

/// Discrete `int_I int_I (u(x) - u(y))^2 dx dy` by the midpoint rule, summed
/// pair by pair with compensation.
pub fn mean_zero_pair_integral(u: &SampledFunction) -> f64 {
    let v = u.values();
    let c = u.grid().cell_measure();
    let mut acc = Neumaier::new();
    for (i, &a) in v.iter().enumerate() {
        let mut row = Neumaier::new();
        for &b in &v[i + 1..] {
            row.add((a - b) * (a - b));
        }
        acc.add(row.total());
    }
    2.0 * c * c * acc.total()
}

/// Subtracts the discrete mean so that the midpoint integral vanishes.
pub fn center(u: &SampledFunction) -> SampledFunction {
    let mean = neumaier_sum(u.values().iter().copied()) / u.values().len() as f64;
    u.map_values(|v| v - mean)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: u32,
    /// `int_0^1 u_n^2 / (x^alpha (1 - x)^alpha)`
    pub hardy_integral: f64,
    /// The Hardy integral divided by its `n -> inf` limit `B(1 - alpha, 1 - alpha)`.
    pub hardy_over_limit: f64,
    /// The Hardy integral divided by the table's band scale.
    pub hardy_normalized: f64,
    pub gagliardo_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub alpha: f64,
    pub grid_n: usize,
    pub rows: Vec<ScalingRow>,
    /// `B(1 - alpha, 1 - alpha)`, the Hardy integral of the constant 1.
    pub hardy_limit: f64,
    /// Geometric mean of the smallest and largest Hardy integral; the column
    /// fits a band `[c/2, 2c]` for some `c` iff it fits `[scale/2, 2 scale]`.
    pub hardy_band_scale: f64,
    /// Least-squares slope of `log gagliardo_sq` against `log n`.
    pub fitted_slope: f64,
    /// Predicted slope `-(1 - alpha)`.
    pub expected_slope: f64,
}

impl ScalingTable {
    pub const CSV_HEADER: &'static str = "alpha,n,hardy_integral,gagliardo_sq,fitted_slope";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e}\n",
                self.alpha, r.n, r.hardy_integral, r.gagliardo_sq, self.fitted_slope
            ));
        }
        s
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Grid size used by [`counterexample_scaling`] when none is given:
/// the smallest power of two with `h <= 1 / (16 n_max)`.
pub fn default_scaling_grid(n_max: u32) -> usize {
    (16 * n_max as usize).next_power_of_two()
}

/// Plateau family `u_n` on `(0, 1)`: Hardy integral and Gagliardo pair sum at
/// `gamma = alpha / 2` for each `n`, with the log-log slope of the latter.
pub fn counterexample_scaling(alpha: f64, n_list: &[u32], grid_n: Option<usize>) -> Result<ScalingTable> {
    check_alpha(alpha)?;
    if n_list.len() < 2 || n_list.iter().any(|&n| n < 2) {
        return Err(Error::Parameter("need at least two plateau indices, each >= 2".into()));
    }
    let n_max = *n_list.iter().max().unwrap();
    let grid_n = grid_n.unwrap_or_else(|| default_scaling_grid(n_max));
    if (grid_n as f64) < 16.0 * n_max as f64 {
        return Err(Error::Resolution(format!("grid of {grid_n} cells is too coarse for n = {n_max}; need h <= 1/(16 n)")));
    }
    let g = Grid1D::new(Interval::unit(), grid_n)?;
    let x = g.nodes();
    let limit = statrs::function::beta::beta(1.0 - alpha, 1.0 - alpha);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let u = sample(&FunctionSpec::new(Family::Plateau { n }), g.clone())?;
        let hardy = g.h() * neumaier_sum(x.iter().zip(u.values()).map(|(x, v)| v * v / (x * (1.0 - x)).powf(alpha)));
        let gs = gagliardo_sq(&u, 0.5 * alpha)?.value_sq;
        rows.push(ScalingRow { n, hardy_integral: hardy, hardy_over_limit: hardy / limit, hardy_normalized: 0.0, gagliardo_sq: gs });
    }
    let lo = rows.iter().map(|r| r.hardy_integral).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.hardy_integral).fold(0.0, f64::max);
    let scale = (lo * hi).sqrt();
    for r in &mut rows {
        r.hardy_normalized = r.hardy_integral / scale;
    }
    let lx: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.gagliardo_sq.ln()).collect();
    Ok(ScalingTable { alpha, grid_n, hardy_limit: limit, hardy_band_scale: scale, fitted_slope: fit_slope(&lx, &ly), expected_slope: -(1.0 - alpha), rows })
}
