use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

/// `x` with 12 significant digits.
pub fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        format!("{:.*}", (11 - exp).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

pub fn sig_opt(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_else(|| "n/a".into())
}

pub struct Sink {
    pub dir: PathBuf,
    pub format: Format,
}

impl Sink {
    fn write(&self, path: &Path, contents: &str) -> Result<(), String> {
        fs::create_dir_all(&self.dir).map_err(|e| format!("cannot create {}: {e}", self.dir.display()))?;
        fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
    }

    /// Writes `<stem>.json` and/or `<stem>.csv` per the selected format.
    pub fn emit<T: Serialize>(&self, stem: &str, value: &T, csv: &str) -> Result<Vec<PathBuf>, String> {
        let mut written = Vec::new();
        if matches!(self.format, Format::Json | Format::Both) {
            let path = self.dir.join(format!("{stem}.json"));
            let json = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
            self.write(&path, &json)?;
            written.push(path);
        }
        if matches!(self.format, Format::Csv | Format::Both) {
            let path = self.dir.join(format!("{stem}.csv"));
            self.write(&path, csv)?;
            written.push(path);
        }
        Ok(written)
    }
}
