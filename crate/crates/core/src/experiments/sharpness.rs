use serde::{Deserialize, Serialize};

use crate::domains::{sample, Family, FunctionSpec, Grid1D, Interval};
use crate::error::{Error, Result};
use crate::nemytskii::{apply, NemytskiiOp};
use crate::norms::{increments, refinement_sequence, richardson, sobolev_norm, SmoothnessIndex};

/// Extrapolated increment ratios at or above `1 - RATIO_TOL` count as
/// non-shrinking increments, the logarithmic divergence signature.
pub const RATIO_TOL: f64 = 0.02;
/// Ratios whose last three values span less than this are taken as settled
/// when they cannot be extrapolated.
pub const RATIO_SETTLED: f64 = 0.05;
/// `(base_n, levels)`: `base_n, 2 base_n, ...`.
pub const DEFAULT_SCHEDULES: [(usize, usize); 2] = [(256, 5), (192, 5)];
/// Coarser starting grids do not resolve the cutoff of `phi`, and the kinked
/// sequence at `s = 1.25` then shows a spurious divergence signature.
pub const MIN_BASE_N: usize = 128;
pub const DEFAULT_S_LIST: [f64; 4] = [1.25, 1.4, 1.45, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpnessInput {
    /// `|phi|`, kinked at the origin.
    AbsPhi,
    /// `phi` itself.
    Phi,
}

impl std::fmt::Display for SharpnessInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SharpnessInput::AbsPhi => "abs-phi",
            SharpnessInput::Phi => "phi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convergence {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub s: f64,
    pub input: SharpnessInput,
    pub base_n: usize,
    /// `(n, ||f||^2_{H^s})`
    pub values: Vec<(usize, f64)>,
    pub increments: Vec<f64>,
    pub verdict: Convergence,
    pub limit: Option<f64>,
    /// Extrapolated ratio of consecutive increments.
    pub rate: Option<f64>,
}

impl SharpnessRow {
    pub const CSV_HEADER: &'static str = "s,input,base_n,n,norm_sq,verdict";

    pub fn csv_rows(&self) -> String {
        let verdict = serde_json::to_value(self.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        self.values
            .iter()
            .map(|(n, v)| format!("{},{},{},{},{:e},{}\n", self.s, self.input, self.base_n, n, v, verdict))
            .collect()
    }
}

/// Classifies a refinement sequence by the limit of its per-doubling
/// increment ratio `rho`: increments approaching a constant (`rho -> 1`)
/// diverge logarithmically; `rho < 1` converges geometrically to
/// `last + inc * rho / (1 - rho)`. Returns `(verdict, limit, rho)`; needs five
/// values with monotone increments. Settled ratios that do not extrapolate
/// are used as they stand.
pub fn classify(values: &[f64]) -> (Convergence, Option<f64>, Option<f64>) {
    let inc = increments(values);
    let k = inc.len();
    if k < 4 || !(inc.iter().all(|d| *d > 0.0) || inc.iter().all(|d| *d < 0.0)) {
        return (Convergence::Inconclusive, None, None);
    }
    let ratios: Vec<f64> = inc.windows(2).map(|w| w[1] / w[0]).collect();
    let m = ratios.len();
    let tail = [ratios[m - 3], ratios[m - 2], ratios[m - 1]];
    let spread = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max) - tail.iter().copied().fold(f64::INFINITY, f64::min);
    let rho = match richardson(tail) {
        Some(e) => e.limit,
        None if spread < RATIO_SETTLED => tail[2],
        None => return (Convergence::Inconclusive, None, None),
    };
    if rho >= 1.0 - RATIO_TOL {
        (Convergence::Diverges, None, Some(rho))
    } else if rho > 0.0 {
        (Convergence::Converges, Some(values[k] + inc[k - 1] * rho / (1.0 - rho)), Some(rho))
    } else {
        (Convergence::Inconclusive, None, Some(rho))
    }
}

/// `||T1 phi||^2_{H^s}` and `||phi||^2_{H^s}` on `(-1, 1)` for
/// `phi(x) = x chi(x)`, along each refinement schedule.
pub fn sharpness_study(s_list: &[f64], schedules: &[(usize, usize)]) -> Result<Vec<SharpnessRow>> {
    if s_list.is_empty() || schedules.is_empty() {
        return Err(Error::Configuration("sharpness study needs s values and schedules".into()));
    }
    if let Some((n, _)) = schedules.iter().find(|(n, levels)| *n < MIN_BASE_N || *levels < 5) {
        return Err(Error::Resolution(format!("schedule from n = {n} needs n >= {MIN_BASE_N} and at least 5 levels")));
    }
    let phi = FunctionSpec::new(Family::XCutoff);
    let mut rows = Vec::new();
    for &s in s_list {
        let index = SmoothnessIndex::new(s)?;
        for &(base_n, levels) in schedules {
            for input in [SharpnessInput::AbsPhi, SharpnessInput::Phi] {
                let values = refinement_sequence(base_n, levels, |n| {
                    let u = sample(&phi, Grid1D::new(Interval::new(-1.0, 1.0)?, n)?)?;
                    let f = match input {
                        SharpnessInput::AbsPhi => apply(NemytskiiOp::T1, &u),
                        SharpnessInput::Phi => u,
                    };
                    Ok(sobolev_norm(&f, index)?.value_sq)
                })?;
                let seq: Vec<f64> = values.iter().map(|v| v.1).collect();
                let (verdict, limit, rate) = classify(&seq);
                rows.push(SharpnessRow { s, input, base_n, increments: increments(&seq), values, verdict, limit, rate });
            }
        }
    }
    Ok(rows)
}

/// The expected outcome: everything converges except `|phi|` at `s >= 3/2`.
pub fn expected(s: f64, input: SharpnessInput) -> Convergence {
    if input == SharpnessInput::AbsPhi && s >= 1.5 {
        Convergence::Diverges
    } else {
        Convergence::Converges
    }
}
