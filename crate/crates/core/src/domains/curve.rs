use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary curve `x1 -> x2` of a graph domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Curve {
    Constant { value: f64 },
    /// `c[0] + c[1] x + c[2] x^2 + ...`
    Polynomial { coeffs: Vec<f64> },
    /// Upper arc `sqrt(r^2 - x^2)`.
    Circle { radius: f64 },
    Negated { inner: Box<Curve> },
    /// `minuend(x) - subtrahend(x)`
    Difference { minuend: Box<Curve>, subtrahend: Box<Curve> },
    /// Natural cubic spline through uniformly spaced samples on `[a, b]`.
    Sampled(SampledCurve),
}

impl Curve {
    pub fn flat() -> Self {
        Curve::Constant { value: 0.0 }
    }

    pub fn parabola(c: f64) -> Self {
        Curve::Polynomial { coeffs: vec![0.0, 0.0, c] }
    }

    pub fn minus(self, other: Curve) -> Self {
        Curve::Difference { minuend: Box::new(self), subtrahend: Box::new(other) }
    }

    pub fn negated(self) -> Self {
        Curve::Negated { inner: Box::new(self) }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Curve::Constant { value } => *value,
            Curve::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Curve::Circle { radius } => (radius * radius - x * x).max(0.0).sqrt(),
            Curve::Negated { inner } => -inner.value(x),
            Curve::Difference { minuend, subtrahend } => minuend.value(x) - subtrahend.value(x),
            Curve::Sampled(s) => s.eval(x).0,
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Curve::Constant { .. } => 0.0,
            Curve::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c),
            Curve::Circle { radius } => {
                let r = (radius * radius - x * x).max(0.0).sqrt();
                if r == 0.0 {
                    f64::NEG_INFINITY * x.signum()
                } else {
                    -x / r
                }
            }
            Curve::Negated { inner } => -inner.deriv(x),
            Curve::Difference { minuend, subtrahend } => minuend.deriv(x) - subtrahend.deriv(x),
            Curve::Sampled(s) => s.eval(x).1,
        }
    }

    /// Largest centred second difference `|c(x+e) - 2c(x) + c(x-e)| / e^2`
    /// over `samples` interior points of `[a, b]`.
    pub fn max_second_difference(&self, a: f64, b: f64, samples: usize) -> f64 {
        let e = (b - a) / (4.0 * samples as f64);
        (0..samples)
            .map(|k| {
                let x = a + 2.0 * e + (b - a - 4.0 * e) * (k as f64 + 0.5) / samples as f64;
                (self.value(x + e) - 2.0 * self.value(x) + self.value(x - e)).abs() / (e * e)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledCurveRepr", into = "SampledCurveRepr")]
pub struct SampledCurve {
    a: f64,
    b: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SampledCurveRepr {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl TryFrom<SampledCurveRepr> for SampledCurve {
    type Error = Error;
    fn try_from(r: SampledCurveRepr) -> Result<Self> {
        SampledCurve::new(r.a, r.b, r.values)
    }
}

impl From<SampledCurve> for SampledCurveRepr {
    fn from(s: SampledCurve) -> Self {
        SampledCurveRepr { a: s.a, b: s.b, values: s.values }
    }
}

impl SampledCurve {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 || !(a < b) {
            return Err(Error::Geometry("sampled curve needs a < b and at least 3 samples".into()));
        }
        let n = values.len() - 1;
        let h = (b - a) / n as f64;
        // Natural spline: tridiagonal solve for interior second derivatives.
        let mut second = vec![0.0; n + 1];
        let mut c_prime = vec![0.0; n + 1];
        let mut d_prime = vec![0.0; n + 1];
        for i in 1..n {
            let rhs = 6.0 * (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
            let denom = 4.0 - c_prime[i - 1];
            c_prime[i] = 1.0 / denom;
            d_prime[i] = (rhs - d_prime[i - 1]) / denom;
        }
        for i in (1..n).rev() {
            second[i] = d_prime[i] - c_prime[i] * second[i + 1];
        }
        Ok(Self { a, b, values, second })
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.values.len() - 1;
        let h = (self.b - self.a) / n as f64;
        let t = ((x - self.a) / h).clamp(0.0, n as f64);
        let i = (t.floor() as usize).min(n - 1);
        let xi = self.a + i as f64 * h;
        let (u0, u1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let dl = x - xi;
        let dr = xi + h - x;
        let v = m0 * dr.powi(3) / (6.0 * h) + m1 * dl.powi(3) / (6.0 * h) + (u0 / h - m0 * h / 6.0) * dr + (u1 / h - m1 * h / 6.0) * dl;
        let d = -m0 * dr * dr / (2.0 * h) + m1 * dl * dl / (2.0 * h) - (u0 / h - m0 * h / 6.0) + (u1 / h - m1 * h / 6.0);
        (v, d)
    }
}
