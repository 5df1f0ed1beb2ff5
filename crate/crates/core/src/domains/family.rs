use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::grid::{Grid, Interval};
use super::sampled::{Field, Point};
use crate::error::{Error, Result};
use crate::numeric::{smoothstep, smoothstep_deriv};

/// Built-in function families. Serialized as `{"family": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum Family {
    Constant {
        value: f64,
    },
    /// `intercept + slope * x1 + slope2 * x2`
    Linear {
        slope: f64,
        intercept: f64,
        #[serde(default)]
        slope2: f64,
    },
    /// `coef * x1^p1 * x2^p2`
    Monomial {
        coef: f64,
        p1: u32,
        p2: u32,
    },
    /// Indicator of `lo < x1 < hi`.
    Indicator {
        lo: f64,
        hi: f64,
    },
    /// `amplitude * sin(2 pi frequency x1 + phase)`
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    GaussianBump {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude * exp(1 - 1 / (1 - |x - c|^2 / r^2))` inside the ball, 0 outside.
    CompactBump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
    /// `x * chi(x)` with `chi = 1` on `|x| <= 1/4` and `0` on `|x| >= 1/2`.
    XCutoff,
    /// Plateau `u_n`: 1 on `[1/n, 1 - 1/n]`, 0 within `1/(2n)` of the ends.
    Plateau {
        n: u32,
    },
    /// Seeded trigonometric polynomial with zero mean over one period box.
    RandomTrig {
        degree: u32,
        period: f64,
        #[serde(default = "default_decay")]
        decay: f64,
    },
    /// Seeded trigonometric polynomial multiplied by a compact bump window.
    WindowedTrig {
        degree: u32,
        period: f64,
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "default_decay")]
        decay: f64,
    },
    /// `b(x - c) - b(x + c)` for a compact bump `b` of the given radius.
    OddBumpPair {
        offset: f64,
        radius: f64,
    },
}

fn default_decay() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

impl FunctionSpec {
    pub fn new(family: Family) -> Self {
        Self { family, seed: 0 }
    }

    pub fn seeded(family: Family, seed: u64) -> Self {
        Self { family, seed }
    }

    /// Resolves random coefficients and validates parameters for dimension `dim`.
    pub fn compile(&self, dim: usize) -> Result<CompiledSpec> {
        if dim != 1 && dim != 2 {
            return Err(Error::Domain(format!("dimension {dim} is not supported")));
        }
        let check_center = |c: &[f64]| -> Result<[f64; 2]> {
            if c.len() != dim {
                return Err(Error::Domain(format!("center has {} coordinates for a {dim}D grid", c.len())));
            }
            Ok([c[0], if dim == 2 { c[1] } else { 0.0 }])
        };
        let positive = |v: f64, name: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be positive, got {v}")))
            }
        };
        let kind = match &self.family {
            Family::Constant { value } => Compiled::Linear([*value, 0.0, 0.0]),
            Family::Linear { slope, intercept, slope2 } => {
                if dim == 1 && *slope2 != 0.0 {
                    return Err(Error::Domain("slope2 needs a 2D grid".into()));
                }
                Compiled::Linear([*intercept, *slope, *slope2])
            }
            Family::Monomial { coef, p1, p2 } => {
                if dim == 1 && *p2 > 0 {
                    return Err(Error::Domain("x2 power needs a 2D grid".into()));
                }
                Compiled::Monomial(*coef, *p1 as i32, *p2 as i32)
            }
            Family::Indicator { lo, hi } => {
                if !(lo < hi) {
                    return Err(Error::Parameter(format!("indicator needs lo < hi, got ({lo}, {hi})")));
                }
                Compiled::Indicator(*lo, *hi)
            }
            Family::Sine { amplitude, frequency, phase } => Compiled::Sine(*amplitude, *frequency, *phase),
            Family::GaussianBump { center, width, amplitude } => {
                positive(*width, "width")?;
                Compiled::Gaussian(check_center(center)?, *width, *amplitude)
            }
            Family::CompactBump { center, radius, amplitude } => {
                positive(*radius, "radius")?;
                Compiled::Bump(check_center(center)?, *radius, *amplitude)
            }
            Family::XCutoff => {
                if dim != 1 {
                    return Err(Error::Domain("x-cutoff is a 1D family".into()));
                }
                Compiled::XCutoff
            }
            Family::Plateau { n } => {
                if dim != 1 {
                    return Err(Error::Domain("plateau is a 1D family".into()));
                }
                if *n < 2 {
                    return Err(Error::Parameter(format!("plateau needs n >= 2, got {n}")));
                }
                Compiled::Plateau(*n as f64)
            }
            Family::RandomTrig { degree, period, decay } => {
                positive(*period, "period")?;
                Compiled::Trig(Trig::generate(dim, *degree, *period, *decay, self.seed)?)
            }
            Family::WindowedTrig { degree, period, center, radius, decay } => {
                positive(*period, "period")?;
                positive(*radius, "radius")?;
                let c = check_center(center)?;
                Compiled::Windowed(Trig::generate(dim, *degree, *period, *decay, self.seed)?, c, *radius)
            }
            Family::OddBumpPair { offset, radius } => {
                if dim != 1 {
                    return Err(Error::Domain("odd bump pair is a 1D family".into()));
                }
                positive(*radius, "radius")?;
                Compiled::OddPair(*offset, *radius)
            }
        };
        Ok(CompiledSpec { dim, kind })
    }

    /// Interval of `x1` outside which the family is not defined, if any.
    pub fn support_interval(&self) -> Option<Interval> {
        match self.family {
            Family::Plateau { .. } => Some(Interval::unit()),
            _ => None,
        }
    }

    /// Checks that every active node of `grid` lies in the family's domain.
    pub(crate) fn check_covers(&self, grid: &Grid) -> Result<()> {
        if let Some(dom) = self.support_interval() {
            let (lo, hi) = match grid {
                Grid::One(g) => (g.interval.a, g.interval.b),
                Grid::Two(g) => (g.x.a, g.x.b),
            };
            if lo < dom.a - 1e-14 || hi > dom.b + 1e-14 {
                return Err(Error::Domain(format!(
                    "family defined on ({}, {}) but grid spans ({lo}, {hi})",
                    dom.a, dom.b
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CompiledSpec {
    dim: usize,
    kind: Compiled,
}

#[derive(Debug, Clone)]
enum Compiled {
    Linear([f64; 3]),
    Monomial(f64, i32, i32),
    Indicator(f64, f64),
    Sine(f64, f64, f64),
    Gaussian(Point, f64, f64),
    Bump(Point, f64, f64),
    XCutoff,
    Plateau(f64),
    Trig(Trig),
    Windowed(Trig, Point, f64),
    OddPair(f64, f64),
}

/// `sum_k c_k cos(2 pi k.x / L + theta_k)` over a half-lattice of wave vectors.
#[derive(Debug, Clone)]
struct Trig {
    terms: Vec<([f64; 2], f64, f64)>,
}

impl Trig {
    fn generate(dim: usize, degree: u32, period: f64, decay: f64, seed: u64) -> Result<Self> {
        if degree == 0 || degree > 64 {
            return Err(Error::Parameter(format!("trigonometric degree must be in 1..=64, got {degree}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = degree as i64;
        let mut terms = Vec::new();
        let base = 2.0 * PI / period;
        let mut push = |k1: i64, k2: i64, rng: &mut ChaCha8Rng| {
            let kn = ((k1 * k1 + k2 * k2) as f64).sqrt();
            let amp: f64 = rng.sample::<f64, _>(StandardNormal) / (1.0 + kn).powf(decay);
            let phase = rng.random::<f64>() * 2.0 * PI;
            terms.push(([base * k1 as f64, base * k2 as f64], amp, phase));
        };
        if dim == 1 {
            for k in 1..=d {
                push(k, 0, &mut rng);
            }
        } else {
            for k2 in 0..=d {
                for k1 in -d..=d {
                    if (k2 == 0 && k1 <= 0) || k1 * k1 + k2 * k2 > d * d {
                        continue;
                    }
                    push(k1, k2, &mut rng);
                }
            }
        }
        Ok(Self { terms })
    }

    fn value(&self, p: Point) -> f64 {
        self.terms
            .iter()
            .map(|(k, a, th)| a * (k[0] * p[0] + k[1] * p[1] + th).cos())
            .sum()
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (k, a, th) in &self.terms {
            let s = -a * (k[0] * p[0] + k[1] * p[1] + th).sin();
            g[0] += s * k[0];
            g[1] += s * k[1];
        }
        g
    }
}

fn bump(p: Point, c: Point, r: f64) -> (f64, [f64; 2]) {
    let d = [p[0] - c[0], p[1] - c[1]];
    let q = (d[0] * d[0] + d[1] * d[1]) / (r * r);
    if q >= 1.0 {
        return (0.0, [0.0, 0.0]);
    }
    let v = (1.0 - 1.0 / (1.0 - q)).exp();
    let dv_dq = -v / ((1.0 - q) * (1.0 - q));
    (v, [dv_dq * 2.0 * d[0] / (r * r), dv_dq * 2.0 * d[1] / (r * r)])
}

/// Ramp of the plateau family on `[1/(2n), 1/n]`, mirrored at the right end.
fn plateau(x: f64, n: f64) -> (f64, f64) {
    let w = 0.5 / n;
    let (t, sign) = if x <= 0.5 { ((x - w) / w, 1.0) } else { ((1.0 - x - w) / w, -1.0) };
    (smoothstep(t), sign * smoothstep_deriv(t) / w)
}

fn cutoff(x: f64) -> (f64, f64) {
    let t = (x.abs() - 0.25) / 0.25;
    (1.0 - smoothstep(t), -smoothstep_deriv(t) / 0.25 * x.signum())
}

impl Field for CompiledSpec {
    fn value(&self, p: Point) -> f64 {
        let p = if self.dim == 1 { [p[0], 0.0] } else { p };
        match &self.kind {
            Compiled::Linear(c) => c[0] + c[1] * p[0] + c[2] * p[1],
            Compiled::Monomial(c, a, b) => c * p[0].powi(*a) * p[1].powi(*b),
            Compiled::Indicator(lo, hi) => {
                if *lo < p[0] && p[0] < *hi {
                    1.0
                } else {
                    0.0
                }
            }
            Compiled::Sine(a, f, ph) => a * (2.0 * PI * f * p[0] + ph).sin(),
            Compiled::Gaussian(c, w, a) => {
                let r2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
                a * (-r2 / (2.0 * w * w)).exp()
            }
            Compiled::Bump(c, r, a) => a * bump(p, *c, *r).0,
            Compiled::XCutoff => p[0] * cutoff(p[0]).0,
            Compiled::Plateau(n) => plateau(p[0], *n).0,
            Compiled::Trig(t) => t.value(p),
            Compiled::Windowed(t, c, r) => t.value(p) * bump(p, *c, *r).0,
            Compiled::OddPair(c, r) => bump(p, [*c, 0.0], *r).0 - bump(p, [-c, 0.0], *r).0,
        }
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let p = if self.dim == 1 { [p[0], 0.0] } else { p };
        let mut g = match &self.kind {
            Compiled::Linear(c) => [c[1], c[2]],
            Compiled::Monomial(c, a, b) => {
                let da = if *a == 0 { 0.0 } else { c * *a as f64 * p[0].powi(a - 1) * p[1].powi(*b) };
                let db = if *b == 0 { 0.0 } else { c * *b as f64 * p[0].powi(*a) * p[1].powi(b - 1) };
                [da, db]
            }
            Compiled::Indicator(..) => [0.0, 0.0],
            Compiled::Sine(a, f, ph) => [a * 2.0 * PI * f * (2.0 * PI * f * p[0] + ph).cos(), 0.0],
            Compiled::Gaussian(c, w, a) => {
                let r2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
                let v = a * (-r2 / (2.0 * w * w)).exp();
                [-v * (p[0] - c[0]) / (w * w), -v * (p[1] - c[1]) / (w * w)]
            }
            Compiled::Bump(c, r, a) => {
                let (_, g) = bump(p, *c, *r);
                [a * g[0], a * g[1]]
            }
            Compiled::XCutoff => {
                let (chi, dchi) = cutoff(p[0]);
                [chi + p[0] * dchi, 0.0]
            }
            Compiled::Plateau(n) => [plateau(p[0], *n).1, 0.0],
            Compiled::Trig(t) => t.gradient(p),
            Compiled::Windowed(t, c, r) => {
                let (w, dw) = bump(p, *c, *r);
                let v = t.value(p);
                let dv = t.gradient(p);
                [dv[0] * w + v * dw[0], dv[1] * w + v * dw[1]]
            }
            Compiled::OddPair(c, r) => {
                let (_, g1) = bump(p, [*c, 0.0], *r);
                let (_, g2) = bump(p, [-c, 0.0], *r);
                [g1[0] - g2[0], 0.0]
            }
        };
        if self.dim == 1 {
            g[1] = 0.0;
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(spec: &FunctionSpec, dim: usize, pts: &[Point]) {
        let c = spec.compile(dim).unwrap();
        let e = 1e-6;
        for &p in pts {
            let g = c.gradient(p);
            for axis in 0..dim {
                let mut hi = p;
                let mut lo = p;
                hi[axis] += e;
                lo[axis] -= e;
                let fd = (c.value(hi) - c.value(lo)) / (2.0 * e);
                assert!((fd - g[axis]).abs() < 1e-5 * (1.0 + g[axis].abs()), "{spec:?} at {p:?}: {fd} vs {}", g[axis]);
            }
        }
    }

    #[test]
    fn analytic_gradients_match_differences() {
        let pts1 = [[0.13, 0.0], [0.31, 0.0], [0.47, 0.0], [0.9, 0.0]];
        for fam in [
            Family::XCutoff,
            Family::Plateau { n: 8 },
            Family::Sine { amplitude: 2.0, frequency: 1.5, phase: 0.3 },
            Family::RandomTrig { degree: 6, period: 1.0, decay: 1.0 },
            Family::OddBumpPair { offset: 0.3, radius: 0.2 },
            Family::GaussianBump { center: vec![0.4], width: 0.1, amplitude: 1.0 },
        ] {
            fd_check(&FunctionSpec::seeded(fam, 3), 1, &pts1);
        }
        let pts2 = [[0.1, 0.2], [-0.3, 0.45], [0.6, -0.2]];
        for fam in [
            Family::RandomTrig { degree: 5, period: 2.0, decay: 1.0 },
            Family::WindowedTrig { degree: 4, period: 2.0, center: vec![0.0, 0.1], radius: 0.8, decay: 1.0 },
            Family::CompactBump { center: vec![0.1, 0.0], radius: 0.7, amplitude: 2.0 },
            Family::Monomial { coef: 1.5, p1: 1, p2: 2 },
        ] {
            fd_check(&FunctionSpec::seeded(fam, 11), 2, &pts2);
        }
    }

    #[test]
    fn plateau_shape() {
        let c = FunctionSpec::new(Family::Plateau { n: 8 }).compile(1).unwrap();
        assert_eq!(c.value([0.03, 0.0]), 0.0);
        assert_eq!(c.value([0.125, 0.0]), 1.0);
        assert_eq!(c.value([0.5, 0.0]), 1.0);
        assert_eq!(c.value([0.96, 0.0]), 0.0);
        assert!((c.value([0.09375, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_trig_has_zero_period_mean() {
        let c = FunctionSpec::seeded(Family::RandomTrig { degree: 7, period: 1.0, decay: 1.0 }, 42)
            .compile(1)
            .unwrap();
        let n = 512;
        let mean: f64 = (0..n).map(|k| c.value([(k as f64 + 0.5) / n as f64, 0.0])).sum::<f64>() / n as f64;
        assert!(mean.abs() < 1e-13);
    }

    #[test]
    fn spec_json_shape_and_round_trip() {
        let s = FunctionSpec::seeded(Family::Linear { slope: 1.0, intercept: 0.0, slope2: 0.0 }, 7);
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(j["family"], "linear");
        assert_eq!(j["params"]["slope"], 1.0);
        assert_eq!(j["seed"], 7);
        let back: FunctionSpec = serde_json::from_value(j).unwrap();
        assert_eq!(back, s);
        let unit: FunctionSpec = serde_json::from_str(r#"{"family":"x-cutoff"}"#).unwrap();
        assert_eq!(unit.family, Family::XCutoff);
    }

    #[test]
    fn dimension_mismatch_is_a_domain_error() {
        let s = FunctionSpec::new(Family::GaussianBump { center: vec![0.0, 0.0], width: 1.0, amplitude: 1.0 });
        assert!(matches!(s.compile(1), Err(Error::Domain(_))));
        assert!(matches!(FunctionSpec::new(Family::XCutoff).compile(2), Err(Error::Domain(_))));
    }
}
