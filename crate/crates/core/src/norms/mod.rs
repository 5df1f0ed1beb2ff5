//! Gagliardo seminorms, `H^s` norms for `0 <= s < 2`, and a Fourier-side oracle.

mod fourier;
mod pairsum;
mod richardson;

use serde::{Deserialize, Serialize};

use crate::domains::SampledFunction;
use crate::error::{Error, Result};

pub use fourier::{fourier_seminorm_sq, gagliardo_fourier_constant};
pub use pairsum::{PairSumMethod, CONVOLUTION_NODE_CAP, DIRECT_NODE_CAP};
pub use richardson::{increments, log_divergence, richardson, RichardsonEstimate, NON_SHRINK_RATIO};

/// Smoothness index `s = m + gamma` with `m = floor(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SmoothnessIndex {
    s: f64,
}

impl SmoothnessIndex {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&s) {
            return Err(Error::Unsupported(format!("smoothness index must lie in [0, 2), got {s}")));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn m(&self) -> usize {
        if self.s >= 1.0 {
            1
        } else {
            0
        }
    }

    pub fn gamma(&self) -> f64 {
        self.s - self.m() as f64
    }

    /// Weight exponent `alpha = 2 gamma` of the fractional part.
    pub fn alpha(&self) -> f64 {
        2.0 * self.gamma()
    }
}

impl TryFrom<f64> for SmoothnessIndex {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<SmoothnessIndex> for f64 {
    fn from(s: SmoothnessIndex) -> f64 {
        s.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeminormMethod {
    PairSum,
    FourierOracle,
}

impl std::fmt::Display for SeminormMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::PairSum => "pair-sum",
            Self::FourierOracle => "fourier-oracle",
        })
    }
}

/// A squared seminorm or norm together with its square root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormResult {
    pub value_sq: f64,
    pub value: f64,
    /// `gamma` for a seminorm, `s` for a full norm.
    pub gamma_or_s: f64,
    /// Grid resolution (nodes per axis).
    pub n: usize,
    pub method: SeminormMethod,
    /// Observed convergence order, when a refinement study supplied one.
    pub rate: Option<f64>,
}

impl SeminormResult {
    fn from_sq(value_sq: f64, gamma_or_s: f64, n: usize, method: SeminormMethod) -> Self {
        let value_sq = value_sq.max(0.0);
        Self { value_sq, value: value_sq.sqrt(), gamma_or_s, n, method, rate: None }
    }

    fn from_value(value: f64, gamma_or_s: f64, n: usize, method: SeminormMethod) -> Self {
        Self { value_sq: value * value, value, gamma_or_s, n, method, rate: None }
    }

    pub const CSV_HEADER: &'static str = "value_sq,value,gamma_or_s,n,method,rate";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.12e},{:.12e},{},{},{},{}",
            self.value_sq,
            self.value,
            self.gamma_or_s,
            self.n,
            self.method,
            self.rate.map(|r| format!("{r:.6}")).unwrap_or_default()
        )
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Parameter(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    Ok(())
}

/// Squared Gagliardo seminorm of `f` over its grid domain by the midpoint
/// pair sum (same-cell pairs excluded).
pub fn gagliardo_sq(f: &SampledFunction, gamma: f64) -> Result<SeminormResult> {
    gagliardo_sq_with(f, gamma, PairSumMethod::Auto)
}

pub fn gagliardo_sq_with(f: &SampledFunction, gamma: f64, method: PairSumMethod) -> Result<SeminormResult> {
    check_gamma(gamma)?;
    if f.values().len() < 2 {
        return Err(Error::Degenerate(format!("{} active nodes; need at least 2", f.values().len())));
    }
    let s = pairsum::pair_sum(f.grid(), f.values(), gamma, method)?;
    Ok(SeminormResult::from_sq(s, gamma, f.grid().resolution(), SeminormMethod::PairSum))
}

/// Squared Gagliardo seminorm over the whole space of `f` extended by zero:
/// the pair sum plus `2 int f^2 w` with the exterior weight
/// `w(x) = int_{outside} |x - y|^{-(d + 2 gamma)} dy`.
pub fn whole_space_gagliardo_sq(f: &SampledFunction, gamma: f64) -> Result<SeminormResult> {
    let inner = gagliardo_sq(f, gamma)?;
    let w = pairsum::exterior_weights(f.grid(), gamma)?;
    let cell = f.grid().cell_measure();
    let tail = 2.0 * cell * crate::numeric::neumaier_sum(f.values().iter().zip(&w).map(|(v, w)| v * v * w));
    Ok(SeminormResult::from_sq(inner.value_sq + tail, gamma, inner.n, SeminormMethod::PairSum))
}

/// `H^s` norm on the grid domain:
/// `s = 0`: `||f||_2`; `0 < s < 1`: `||f||_2 + |f|_{s}`; `s = 1`: `||f||_{H^1}`;
/// `1 < s < 2`: `||f||_{H^1} + (sum_c |d_c f|_{s-1}^2)^{1/2}`.
pub fn sobolev_norm(f: &SampledFunction, s: SmoothnessIndex) -> Result<SeminormResult> {
    let n = f.grid().resolution();
    let l2_sq = f.l2_norm_sq();
    let gamma = s.gamma();
    let value = match s.m() {
        0 if gamma == 0.0 => l2_sq.sqrt(),
        0 => l2_sq.sqrt() + gagliardo_sq(f, gamma)?.value,
        _ => {
            let h1 = (l2_sq + f.gradient_l2_norm_sq()?).sqrt();
            if gamma == 0.0 {
                h1
            } else {
                let mut frac_sq = 0.0;
                for c in 0..f.dim() {
                    frac_sq += gagliardo_sq(&f.gradient_component(c)?, gamma)?.value_sq;
                }
                h1 + frac_sq.sqrt()
            }
        }
    };
    Ok(SeminormResult::from_value(value, s.s(), n, SeminormMethod::PairSum))
}

/// Fourier-side estimate of the whole-space seminorm,
/// `2 C(d, gamma) sum |xi|^(2 gamma) |f^|^2`.
pub fn fourier_gagliardo_sq(f: &SampledFunction, gamma: f64) -> Result<SeminormResult> {
    check_gamma(gamma)?;
    let c = gagliardo_fourier_constant(f.dim(), gamma)?;
    let v = 2.0 * c * fourier_seminorm_sq(f, gamma)?;
    Ok(SeminormResult::from_sq(v, gamma, f.grid().resolution(), SeminormMethod::FourierOracle))
}

/// Pair sums at `n, 2n, 4n, ...` for `levels` levels, from `eval`.
pub fn refinement_sequence(
    base_n: usize,
    levels: usize,
    mut eval: impl FnMut(usize) -> Result<f64>,
) -> Result<Vec<(usize, f64)>> {
    (0..levels)
        .map(|k| {
            let n = base_n << k;
            eval(n).map(|v| (n, v))
        })
        .collect()
}

/// Richardson extrapolation of a functional evaluated at `n, 2n, 4n`.
pub fn extrapolate(base_n: usize, eval: impl FnMut(usize) -> Result<f64>) -> Result<(Vec<(usize, f64)>, Option<RichardsonEstimate>)> {
    let seq = refinement_sequence(base_n, 3, eval)?;
    let est = richardson([seq[0].1, seq[1].1, seq[2].1]);
    Ok((seq, est))
}

#[cfg(test)]
mod tests;
