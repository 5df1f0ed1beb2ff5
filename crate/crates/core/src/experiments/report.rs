use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::sharpness::{expected, sharpness_study, SharpnessRow};
use super::spectral::{anisotropic_multiplier_check, musina_nazarov_check, sign_changing_family, MultiplierReport};
use super::sweep::{operator_norm_sweep, SweepConfig, SweepReport};
use crate::error::{Error, Result};
use crate::hardy::InequalityReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything one run produced. Every section may be empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    #[serde(default)]
    pub sweeps: Vec<SweepReport>,
    #[serde(default)]
    pub sharpness: Vec<SharpnessRow>,
    #[serde(default)]
    pub musina_nazarov: Vec<InequalityReport>,
    #[serde(default)]
    pub multiplier: Vec<MultiplierReport>,
    #[serde(default)]
    pub claims: Vec<Claim>,
}

impl StudyReport {
    /// Derives one claim per study section from the stored results, replacing
    /// any existing claims.
    pub fn derive_claims(&mut self) {
        let mut claims = Vec::new();
        for sweep in &self.sweeps {
            let failing = sweep.failing_cells();
            let detail = if failing.is_empty() {
                format!("{} s values within drift {}", sweep.verdicts.len(), sweep.drift_tol)
            } else {
                let cells: Vec<String> = failing.iter().map(|(s, n)| format!("(s = {s}, n = {n})")).collect();
                format!("failing cells: {}", cells.join(", "))
            };
            claims.push(Claim { name: format!("{} bounded on {}", sweep.operator, sweep.domain), passed: sweep.passed, detail });
        }
        if !self.sharpness.is_empty() {
            let wrong: Vec<String> = self
                .sharpness
                .iter()
                .filter(|r| r.verdict != expected(r.s, r.input))
                .map(|r| format!("{} at s = {} (base {}): {:?}", r.input, r.s, r.base_n, r.verdict))
                .collect();
            claims.push(Claim {
                name: "|phi| leaves H^s exactly at s = 3/2".into(),
                passed: wrong.is_empty(),
                detail: if wrong.is_empty() { format!("{} sequences as expected", self.sharpness.len()) } else { wrong.join("; ") },
            });
        }
        if !self.musina_nazarov.is_empty() {
            let failed: Vec<&str> =
                self.musina_nazarov.iter().filter(|r| !r.verdict.passed()).map(|r| r.family_id.as_str()).collect();
            claims.push(Claim {
                name: "strict gap Q(|u|) > Q(u) for sign-changing u".into(),
                passed: failed.is_empty(),
                detail: if failed.is_empty() { format!("{} cases", self.musina_nazarov.len()) } else { failed.join(", ") },
            });
        }
        for m in &self.multiplier {
            claims.push(Claim {
                name: format!("multiplier domination, gamma = {:.6}", m.gamma),
                passed: m.violations == 0,
                detail: format!("max ratio {:.12} <= {:.12} at {:?}, {} violations", m.max_ratio, m.constant, m.argmax, m.violations),
            });
        }
        self.claims = claims;
    }

    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for sweep in &self.sweeps {
            out.push_str(&sweep.to_csv());
        }
        if !self.sharpness.is_empty() {
            out.push_str(SharpnessRow::CSV_HEADER);
            out.push('\n');
            for row in &self.sharpness {
                out.push_str(&row.csv_rows());
            }
        }
        if !self.musina_nazarov.is_empty() {
            out.push_str("family_id,lhs,rhs,empirical_constant,verdict\n");
            for r in &self.musina_nazarov {
                let c = r.empirical_constant.map(|c| format!("{c:e}")).unwrap_or_default();
                out.push_str(&format!("{},{:e},{:e},{},{:?}\n", r.family_id, r.lhs, r.rhs, c, r.verdict));
            }
        }
        if !self.multiplier.is_empty() {
            out.push_str("gamma,constant,max_ratio,k1,k2,violations\n");
            for m in &self.multiplier {
                out.push_str(&format!(
                    "{},{:e},{:e},{},{},{}\n",
                    m.gamma, m.constant, m.max_ratio, m.argmax[0], m.argmax[1], m.violations
                ));
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        if self.claims.is_empty() {
            out.push_str("no claims evaluated\n");
        }
        for c in &self.claims {
            out.push_str(&format!("[{}] {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessConfig {
    pub s_list: Vec<f64>,
    /// `(base_n, levels)` pairs.
    pub schedules: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapConfig {
    pub s_list: Vec<f64>,
    /// Number of sign-changing members.
    pub count: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierConfig {
    pub s: f64,
    /// Side of the frequency box.
    pub n: usize,
}

/// A JSON study document; every section is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default)]
    pub sweeps: Vec<SweepConfig>,
    #[serde(default)]
    pub sharpness: Option<SharpnessConfig>,
    #[serde(default)]
    pub musina_nazarov: Option<GapConfig>,
    #[serde(default)]
    pub multiplier: Vec<MultiplierConfig>,
}

/// Runs every configured study and derives the claims.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    let mut report = StudyReport {
        sweeps: cfg.sweeps.iter().map(operator_norm_sweep).collect::<Result<_>>()?,
        ..Default::default()
    };
    if let Some(c) = &cfg.sharpness {
        report.sharpness = sharpness_study(&c.s_list, &c.schedules)?;
    }
    if let Some(c) = &cfg.musina_nazarov {
        report.musina_nazarov = musina_nazarov_check(&sign_changing_family(c.count, c.n)?, &c.s_list)?;
    }
    report.multiplier = cfg.multiplier.iter().map(|m| anisotropic_multiplier_check(m.s, m.n)).collect::<Result<_>>()?;
    report.derive_claims();
    Ok(report)
}

pub fn load_config(path: &Path) -> Result<StudyConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|source| Error::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Writes `report.json`, `report.csv` and `summary.txt` under `dir`.
pub fn emit_report(report: &StudyReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    Ok(vec![
        write(dir.join("report.json"), &serde_json::to_string_pretty(report)?)?,
        write(dir.join("report.csv"), &report.to_csv())?,
        write(dir.join("summary.txt"), &report.summary())?,
    ])
}

pub fn load_report(path: &Path) -> Result<StudyReport> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(serde_json::from_str(&text)?)
}

/// Relative tolerances keyed by field name; unlisted numeric fields use
/// `default`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub default: f64,
    #[serde(default)]
    pub fields: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { default: 1e-9, fields: BTreeMap::new() }
    }
}

/// Field-by-field differences between two reports, as `path: detail` lines.
/// Empty means the reports agree.
pub fn compare_golden(current: &StudyReport, golden: &StudyReport, tol: &Tolerances) -> Result<Vec<String>> {
    let mut diffs = Vec::new();
    diff_values("", None, &serde_json::to_value(current)?, &serde_json::to_value(golden)?, tol, &mut diffs);
    Ok(diffs)
}

fn diff_values(path: &str, field: Option<&str>, a: &Value, b: &Value, tol: &Tolerances, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            let rel = field.and_then(|f| tol.fields.get(f)).copied().unwrap_or(tol.default);
            let scale = x.abs().max(y.abs());
            if (x - y).abs() > rel * scale {
                out.push(format!("{path}: {x:e} vs golden {y:e} (rel tol {rel:e})"));
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            for key in x.keys().chain(y.keys().filter(|k| !x.contains_key(*k))) {
                let sub = format!("{path}/{key}");
                match (x.get(key), y.get(key)) {
                    (Some(u), Some(v)) => diff_values(&sub, Some(key), u, v, tol, out),
                    (Some(_), None) => out.push(format!("{sub}: missing from golden")),
                    _ => out.push(format!("{sub}: missing from current")),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                out.push(format!("{path}: length {} vs golden {}", x.len(), y.len()));
            }
            for (k, (u, v)) in x.iter().zip(y).enumerate() {
                diff_values(&format!("{path}/{k}"), field, u, v, tol, out);
            }
        }
        _ if a == b => {}
        _ => out.push(format!("{path}: {a} vs golden {b}")),
    }
}
