use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{sample, Family, FunctionSpec, Grid, Grid1D, Grid2D, Interval, Region, SampledFunction};
use crate::error::{Error, Result};
use crate::hardy::Verdict;
use crate::nemytskii::{apply, NemytskiiOp};
use crate::norms::{sobolev_norm, SmoothnessIndex};

/// Largest measured ratio accepted as an exact contraction.
pub const CONTRACTION_SLACK: f64 = 1e-10;
pub const DEFAULT_DRIFT_TOL: f64 = 0.05;
pub const DEFAULT_DEGREE: u32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepDomain {
    Interval { a: f64, b: f64 },
    UnitDisk,
}

impl std::fmt::Display for SweepDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepDomain::Interval { a, b } => write!(f, "({a}, {b})"),
            SweepDomain::UnitDisk => f.write_str("unit-disk"),
        }
    }
}

impl SweepDomain {
    fn grid(&self, n: usize) -> Result<Grid> {
        Ok(match self {
            SweepDomain::Interval { a, b } => Grid1D::new(Interval::new(*a, *b)?, n)?.into(),
            SweepDomain::UnitDisk => {
                let side = Interval::new(-1.0, 1.0)?;
                Grid2D::new(side, side, n, n, Region::unit_disk())?.into()
            }
        })
    }

    fn default_family(&self) -> Family {
        let period = match self {
            SweepDomain::Interval { a, b } => b - a,
            SweepDomain::UnitDisk => 2.0,
        };
        Family::RandomTrig { degree: DEFAULT_DEGREE, period, decay: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub operator: NemytskiiOp,
    pub s_list: Vec<f64>,
    pub n_list: Vec<usize>,
    /// Seeded family; a random trigonometric polynomial when absent.
    #[serde(default)]
    pub family: Option<Family>,
    /// Number of seeds, `0..seeds`.
    pub seeds: u64,
    pub domain: SweepDomain,
    #[serde(default = "default_drift")]
    pub drift_tol: f64,
}

fn default_drift() -> f64 {
    DEFAULT_DRIFT_TOL
}

impl SweepConfig {
    pub fn new(operator: NemytskiiOp, s_list: Vec<f64>, n_list: Vec<usize>, seeds: u64, domain: SweepDomain) -> Self {
        Self { operator, s_list, n_list, family: None, seeds, domain, drift_tol: DEFAULT_DRIFT_TOL }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_list.is_empty() || self.n_list.is_empty() || self.seeds == 0 {
            return Err(Error::Configuration("sweep needs at least one s, one n and one seed".into()));
        }
        if let Some(s) = self.s_list.iter().find(|s| !(0.0..1.5).contains(*s)) {
            return Err(Error::Configuration(format!("s = {s} outside [0, 1.5)")));
        }
        if self.n_list.contains(&0) {
            return Err(Error::Configuration("grid sizes must be positive".into()));
        }
        if self.n_list.windows(3).any(|w| w[0] * w[2] != w[1] * w[1]) || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Configuration(format!("grid sizes {:?} are not an increasing geometric sequence", self.n_list)));
        }
        if !(self.drift_tol > 0.0) {
            return Err(Error::Configuration(format!("drift tolerance must be positive, got {}", self.drift_tol)));
        }
        Ok(())
    }

    /// Seed member `seed` on an `n` grid, shifted to zero mean so that it
    /// changes sign.
    pub fn member(&self, seed: u64, n: usize) -> Result<SampledFunction> {
        let family = self.family.clone().unwrap_or_else(|| self.domain.default_family());
        let u = sample(&FunctionSpec::seeded(family, seed), self.domain.grid(n)?)?;
        let measure = u.grid().cell_measure() * u.values().len() as f64;
        let mean = u.integral() / measure;
        let values: Vec<f64> = u.values().iter().map(|v| v - mean).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(min < 0.0 && max > 0.0) {
            return Err(Error::Degenerate(format!("seed {seed} gives a constant sample")));
        }
        let shifted = SampledFunction::new(u.grid().clone(), values)?;
        match u.gradient() {
            Some(g) => shifted.with_gradient(g.to_vec()),
            None => Ok(shifted),
        }
    }
}

/// `||T u||_{H^s} / ||u||_{H^s}`.
pub fn operator_ratio(op: NemytskiiOp, u: &SampledFunction, s: SmoothnessIndex) -> Result<f64> {
    let den = sobolev_norm(u, s)?.value;
    if den == 0.0 {
        return Err(Error::Degenerate("zero input norm".into()));
    }
    Ok(sobolev_norm(&apply(op, u), s)?.value / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub s: f64,
    pub n: usize,
    pub max_ratio: f64,
    pub worst_seed: u64,
    /// Relative change of `max_ratio` from the previous grid size.
    pub drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepVerdict {
    pub s: f64,
    /// Drift between the two finest grids.
    pub final_drift: Option<f64>,
    /// Whether every ratio stays below `1 + CONTRACTION_SLACK` (T1, `s <= 1`).
    pub contraction: Option<bool>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub operator: NemytskiiOp,
    pub domain: SweepDomain,
    pub seeds: u64,
    pub drift_tol: f64,
    pub cells: Vec<SweepCell>,
    pub verdicts: Vec<SweepVerdict>,
    pub passed: bool,
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "operator,s,n,max_ratio,worst_seed,drift";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{:e},{},{}\n",
                self.operator,
                c.s,
                c.n,
                c.max_ratio,
                c.worst_seed,
                c.drift.map(|d| format!("{d:e}")).unwrap_or_default()
            ));
        }
        out
    }

    /// `(s, n)` of the finest cell of every failing `s`.
    pub fn failing_cells(&self) -> Vec<(f64, usize)> {
        self.verdicts
            .iter()
            .filter(|v| v.verdict == Verdict::Fail)
            .filter_map(|v| self.cells.iter().rfind(|c| c.s == v.s).map(|c| (c.s, c.n)))
            .collect()
    }
}

/// Max ratio over the seeded family for every `(s, n)`, with drift per
/// doubling and a verdict per `s`.
pub fn operator_norm_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut cells = Vec::new();
    let mut verdicts = Vec::new();
    for &s in &cfg.s_list {
        let index = SmoothnessIndex::new(s)?;
        let mut row: Vec<SweepCell> = Vec::new();
        for &n in &cfg.n_list {
            let ratios: Vec<f64> = (0..cfg.seeds)
                .into_par_iter()
                .map(|seed| {
                    cfg.member(seed, n)
                        .and_then(|u| operator_ratio(cfg.operator, &u, index))
                        .map_err(|e| e.context(format!("s = {s}, n = {n}, seed = {seed}")))
                })
                .collect::<Result<_>>()?;
            let (worst_seed, max_ratio) = ratios
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (k, &r)| if r > acc.1 { (k as u64, r) } else { acc });
            let drift = row.last().map(|prev| (max_ratio - prev.max_ratio).abs() / prev.max_ratio);
            row.push(SweepCell { s, n, max_ratio, worst_seed, drift });
        }
        let final_drift = row.last().and_then(|c| c.drift);
        let contraction = (cfg.operator == NemytskiiOp::T1 && s <= 1.0)
            .then(|| row.iter().all(|c| c.max_ratio <= 1.0 + CONTRACTION_SLACK));
        let finite = row.iter().all(|c| c.max_ratio.is_finite());
        let verdict = match (finite, contraction, final_drift) {
            (false, _, _) | (_, Some(false), _) => Verdict::Fail,
            (_, _, Some(d)) if d > cfg.drift_tol => Verdict::Fail,
            (_, _, Some(_)) => Verdict::Pass,
            (_, _, None) => Verdict::PassDegenerate,
        };
        verdicts.push(SweepVerdict { s, final_drift, contraction, verdict });
        cells.extend(row);
    }
    let passed = verdicts.iter().all(|v| v.verdict.passed());
    Ok(SweepReport {
        operator: cfg.operator,
        domain: cfg.domain.clone(),
        seeds: cfg.seeds,
        drift_tol: cfg.drift_tol,
        cells,
        verdicts,
        passed,
    })
}
