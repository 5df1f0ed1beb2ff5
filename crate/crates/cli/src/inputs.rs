//! Parsing of function names, domains and numeric lists.

use std::str::FromStr;

use hslab::domains::{Family, FunctionSpec, Grid, Grid1D, Grid2D, Interval, Region};
use hslab::experiments::SweepDomain;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainArg {
    Interval(f64, f64),
    /// `[a, b]^2`
    Square(f64, f64),
    UnitDisk,
}

impl FromStr for DomainArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("disk") {
            return Ok(DomainArg::UnitDisk);
        }
        let (square, rest) = match s.strip_prefix("square:") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let ends: Vec<f64> = parse_list(rest)?;
        match ends[..] {
            [a, b] if a < b => Ok(if square { DomainArg::Square(a, b) } else { DomainArg::Interval(a, b) }),
            _ => Err(format!("expected 'a,b' with a < b, 'square:a,b' or 'disk', got '{s}'")),
        }
    }
}

impl DomainArg {
    pub fn grid(&self, n: usize) -> hslab::Result<Grid> {
        Ok(match *self {
            DomainArg::Interval(a, b) => Grid1D::new(Interval::new(a, b)?, n)?.into(),
            DomainArg::Square(a, b) => Grid2D::new(Interval::new(a, b)?, Interval::new(a, b)?, n, n, Region::Box)?.into(),
            DomainArg::UnitDisk => {
                let side = Interval::new(-1.0, 1.0)?;
                Grid2D::new(side, side, n, n, Region::unit_disk())?.into()
            }
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainArg::Interval(..) => 1,
            _ => 2,
        }
    }

    fn center_and_length(&self) -> (f64, f64) {
        match *self {
            DomainArg::Interval(a, b) | DomainArg::Square(a, b) => (0.5 * (a + b), b - a),
            DomainArg::UnitDisk => (0.0, 2.0),
        }
    }

    pub fn sweep_domain(&self) -> Result<SweepDomain, String> {
        match *self {
            DomainArg::Interval(a, b) => Ok(SweepDomain::Interval { a, b }),
            DomainArg::UnitDisk => Ok(SweepDomain::UnitDisk),
            DomainArg::Square(..) => Err("sweeps run on an interval or the unit disk".into()),
        }
    }
}

pub const FUNCTION_NAMES: &str =
    "constant, linear, sine, gaussian, bump, x-cutoff, plateau, random-trig, windowed-trig, odd-bump-pair";

/// A named test function scaled to `domain`; seeded families use `seed`.
pub fn named_function(name: &str, domain: &DomainArg, seed: u64) -> Result<FunctionSpec, String> {
    let (c, len) = domain.center_and_length();
    let center = vec![c; domain.dim()];
    let family = match name {
        "constant" => Family::Constant { value: 1.0 },
        "linear" => Family::Linear { slope: 1.0, intercept: 0.0, slope2: 0.0 },
        "sine" => Family::Sine { amplitude: 1.0, frequency: 1.0 / len, phase: 0.0 },
        "gaussian" => Family::GaussianBump { center, width: 0.1 * len, amplitude: 1.0 },
        "bump" => Family::CompactBump { center, radius: 0.25 * len, amplitude: 1.0 },
        "x-cutoff" => Family::XCutoff,
        "plateau" => Family::Plateau { n: 8 },
        "random-trig" => Family::RandomTrig { degree: 12, period: len, decay: 1.0 },
        "windowed-trig" => Family::WindowedTrig { degree: 8, period: len, center, radius: 0.45 * len, decay: 1.0 },
        "odd-bump-pair" => Family::OddBumpPair { offset: 0.2 * len, radius: 0.15 * len },
        other => return Err(format!("unknown function '{other}'; expected one of {FUNCTION_NAMES}")),
    };
    Ok(FunctionSpec::seeded(family, seed))
}

/// `--spec` JSON wins over `--fn`.
pub fn resolve_function(name: &str, spec: Option<&str>, domain: &DomainArg, seed: u64) -> Result<FunctionSpec, String> {
    match spec {
        Some(json) => serde_json::from_str(json).map_err(|e| format!("invalid --spec: {e}")),
        None => named_function(name, domain, seed),
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> =
        s.split(',').map(|t| t.trim().parse::<T>().map_err(|e| format!("bad list item '{t}': {e}"))).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

/// `"256x5,192x5"` into `(base_n, levels)` pairs.
pub fn parse_schedules(s: &str) -> Result<Vec<(usize, usize)>, String> {
    s.split(',')
        .map(|item| {
            let (n, levels) = item.trim().split_once('x').ok_or_else(|| format!("schedule '{item}' is not of the form NxL"))?;
            Ok((n.parse().map_err(|e| format!("{item}: {e}"))?, levels.parse().map_err(|e| format!("{item}: {e}"))?))
        })
        .collect()
}

pub fn gamma_value(s: &str) -> Result<f64, String> {
    let g: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if g > 0.0 && g < 1.0 {
        Ok(g)
    } else {
        Err(format!("gamma must lie in the open interval (0, 1), got {g}"))
    }
}

pub fn smoothness_value(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..1.5).contains(&v) {
        Ok(v)
    } else {
        Err(format!("s must lie in [0, 1.5), got {v}"))
    }
}

pub fn alpha_value(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in the open interval (0, 1), got {a}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domains_parse() {
        assert_eq!("0,1".parse::<DomainArg>().unwrap(), DomainArg::Interval(0.0, 1.0));
        assert_eq!("square:-1,1".parse::<DomainArg>().unwrap(), DomainArg::Square(-1.0, 1.0));
        assert_eq!("disk".parse::<DomainArg>().unwrap(), DomainArg::UnitDisk);
        assert!("1,0".parse::<DomainArg>().is_err());
        assert!("0,1,2".parse::<DomainArg>().is_err());
    }

    #[test]
    fn lists_and_schedules() {
        assert_eq!(parse_list::<usize>("256, 512,1024").unwrap(), vec![256, 512, 1024]);
        assert!(parse_list::<f64>("1.0,x").is_err());
        assert_eq!(parse_schedules("256x5,192x4").unwrap(), vec![(256, 5), (192, 4)]);
        assert!(parse_schedules("256").is_err());
    }

    #[test]
    fn ranges() {
        assert!(gamma_value("1.5").unwrap_err().contains("(0, 1)"));
        assert!(smoothness_value("1.5").is_err());
        assert_eq!(smoothness_value("0").unwrap(), 0.0);
        assert!(alpha_value("0").is_err());
    }

    #[test]
    fn every_named_function_samples() {
        let d = DomainArg::Interval(0.0, 1.0);
        for name in FUNCTION_NAMES.split(", ") {
            let spec = named_function(name, &d, 3).unwrap();
            hslab::domains::sample(&spec, d.grid(64).unwrap()).unwrap();
        }
        assert!(named_function("nope", &d, 0).is_err());
    }
}
