use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::domains::{sample, Family, FunctionSpec, Grid1D, Interval, SampledFunction};
use crate::error::{Error, Result};
use crate::hardy::{InequalityReport, Verdict};
use crate::nemytskii::{apply, NemytskiiOp};
use crate::norms::fourier_seminorm_sq;

/// `<(-Delta)^s u, u>` by the discrete Fourier form.
pub fn quadratic_form(u: &SampledFunction, s: f64) -> Result<f64> {
    fourier_seminorm_sq(u, s)
}

/// `<(-Delta)^s |u|, |u|> - <(-Delta)^s u, u>`.
pub fn musina_nazarov_gap(u: &SampledFunction, s: f64) -> Result<f64> {
    Ok(quadratic_form(&apply(NemytskiiOp::T1, u), s)? - quadratic_form(u, s)?)
}

fn check_member(u: &SampledFunction, id: &str) -> Result<()> {
    let values = u.values();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min < 0.0 && max > 0.0) {
        return Err(Error::Precondition(format!("{id} does not change sign (min {min:e}, max {max:e})")));
    }
    let edge = values[0].abs().max(values[values.len() - 1].abs());
    if edge > 1e-10 * max.max(-min) {
        return Err(Error::Precondition(format!("{id} is not compactly supported inside the period")));
    }
    Ok(())
}

/// Strict inequality `Q(|u|) > Q(u)` for each sign-changing member and each
/// `s` in `(1, 3/2)`.
pub fn musina_nazarov_check(members: &[(String, SampledFunction)], s_list: &[f64]) -> Result<Vec<InequalityReport>> {
    if let Some(s) = s_list.iter().find(|s| !(**s > 1.0 && **s < 1.5)) {
        return Err(Error::Parameter(format!("s = {s} outside (1, 3/2)")));
    }
    let mut out = Vec::new();
    for (id, u) in members {
        check_member(u, id)?;
        for &s in s_list {
            let lhs = quadratic_form(&apply(NemytskiiOp::T1, u), s)?;
            let rhs = quadratic_form(u, s)?;
            let mut r = InequalityReport::new(lhs, rhs, 1.0, u.grid().resolution(), &format!("{id}@s={s}"));
            if !(lhs > rhs) {
                r.verdict = Verdict::Fail;
            }
            out.push(r);
        }
    }
    Ok(out)
}

pub const MN_GRID: usize = 2048;

/// The first `count` sign-changing windowed trigonometric polynomials on
/// `(-1, 1)`, each vanishing near the ends.
pub fn sign_changing_family(count: usize, n: usize) -> Result<Vec<(String, SampledFunction)>> {
    let grid = Grid1D::new(Interval::new(-1.0, 1.0)?, n)?;
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    while out.len() < count {
        if seed > 100 * count as u64 + 100 {
            return Err(Error::Degenerate("family produced too few sign-changing members".into()));
        }
        let spec = FunctionSpec::seeded(
            Family::WindowedTrig { degree: 8, period: 2.0, center: vec![0.0], radius: 0.9, decay: 1.0 },
            seed,
        );
        let u = sample(&spec, grid.clone())?;
        if check_member(&u, "").is_ok() {
            out.push((format!("windowed-trig-{seed}"), u));
        }
        seed += 1;
    }
    Ok(out)
}

/// Odd bump pair `b(x - c) - b(x + c)` on `(-1, 1)`.
pub fn odd_bump_pair(n: usize) -> Result<(String, SampledFunction)> {
    let spec = FunctionSpec::new(Family::OddBumpPair { offset: 0.4, radius: 0.3 });
    Ok(("odd-bump-pair".into(), sample(&spec, Grid1D::new(Interval::new(-1.0, 1.0)?, n)?)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub gamma: f64,
    /// `2^(1 + gamma)`
    pub constant: f64,
    pub max_ratio: f64,
    /// Integer frequency attaining the max ratio.
    pub argmax: [i64; 2],
    pub violations: usize,
    pub report: InequalityReport,
}

/// `(1 + |xi|^2)^(1 + gamma) <= 2^(1 + gamma) sum_j (1 + xi_j^2)^(1 + gamma)`
/// at `xi = 2 pi k`, `k` in `[-n/2, n/2)^2`, evaluated in floating point.
pub fn anisotropic_multiplier_check(s: f64, n: usize) -> Result<MultiplierReport> {
    if !(s > 1.0 && s < 1.5) {
        return Err(Error::Parameter(format!("s = {s} outside (1, 3/2)")));
    }
    if n == 0 {
        return Err(Error::Parameter("frequency box must be nonempty".into()));
    }
    let gamma = s - 1.0;
    let p = 1.0 + gamma;
    let c = 2f64.powf(p);
    let half = (n / 2) as i64;
    let lo = -half;
    let hi = n as i64 - half;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = [0, 0];
    let mut violations = 0;
    for k1 in lo..hi {
        let a = (1.0 + (TAU * k1 as f64).powi(2)).powf(p);
        let x1 = (TAU * k1 as f64).powi(2);
        for k2 in lo..hi {
            let x2 = (TAU * k2 as f64).powi(2);
            let lhs = (1.0 + x1 + x2).powf(p);
            let rhs = a + (1.0 + x2).powf(p);
            if lhs > c * rhs {
                violations += 1;
            }
            let r = lhs / rhs;
            if r > max_ratio {
                max_ratio = r;
                argmax = [k1, k2];
            }
        }
    }
    let mut report = InequalityReport::upper(max_ratio, 1.0, c, n, "frequency-box");
    if violations > 0 {
        report.verdict = Verdict::Fail;
    }
    Ok(MultiplierReport { gamma, constant: c, max_ratio, argmax, violations, report })
}
