//! The superposition operators `T1 u = |u|`, `T2 u = u+`, `T3 u = u-`, the
//! positivity-set decomposition used on intervals, and `du * 1_{u > 0}`.

use serde::{Deserialize, Serialize};

use crate::domains::{Grid, SampledFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NemytskiiOp {
    /// `|u|`
    #[serde(alias = "T1")]
    T1,
    /// `max(u, 0)`
    #[serde(alias = "T2")]
    T2,
    /// `max(-u, 0)`
    #[serde(alias = "T3")]
    T3,
}

impl NemytskiiOp {
    pub const ALL: [NemytskiiOp; 3] = [NemytskiiOp::T1, NemytskiiOp::T2, NemytskiiOp::T3];

    pub fn value(self, u: f64) -> f64 {
        match self {
            NemytskiiOp::T1 => u.abs(),
            NemytskiiOp::T2 => u.max(0.0),
            NemytskiiOp::T3 => (-u).max(0.0),
        }
    }

    /// Multiplier `m(u)` with `d(T u) = m(u) du`; zero where `u = 0`.
    pub fn gradient_factor(self, u: f64) -> f64 {
        match self {
            NemytskiiOp::T1 if u > 0.0 => 1.0,
            NemytskiiOp::T1 if u < 0.0 => -1.0,
            NemytskiiOp::T2 if u > 0.0 => 1.0,
            NemytskiiOp::T3 if u < 0.0 => -1.0,
            _ => 0.0,
        }
    }
}

impl std::str::FromStr for NemytskiiOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t1" | "abs" => Ok(NemytskiiOp::T1),
            "t2" | "pos" | "plus" => Ok(NemytskiiOp::T2),
            "t3" | "neg" | "minus" => Ok(NemytskiiOp::T3),
            other => Err(Error::Parameter(format!("unknown operator '{other}', expected t1, t2 or t3"))),
        }
    }
}

impl std::fmt::Display for NemytskiiOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NemytskiiOp::T1 => "T1",
            NemytskiiOp::T2 => "T2",
            NemytskiiOp::T3 => "T3",
        })
    }
}

/// Applies the operator nodewise. When `u` carries a gradient, the output's
/// gradient is assigned by the chain rule for Lipschitz functions rather
/// than differentiated numerically.
pub fn apply(op: NemytskiiOp, u: &SampledFunction) -> SampledFunction {
    let out = u.map_values(|v| op.value(v));
    match u.gradient() {
        None => out,
        Some(g) => {
            let grad = g
                .iter()
                .map(|comp| comp.iter().zip(u.values()).map(|(d, &v)| op.gradient_factor(v) * d).collect())
                .collect();
            out.with_gradient(grad).expect("gradient shape is inherited from the input")
        }
    }
}

/// `du * 1_{u > 0}` on the same grid, as a vector field stored in the
/// gradient slot; the values slot holds the first component.
pub fn gradient_indicator(u: &SampledFunction) -> Result<SampledFunction> {
    let g = u.require_gradient()?;
    let comps: Vec<Vec<f64>> = g
        .iter()
        .map(|comp| comp.iter().zip(u.values()).map(|(d, &v)| if v > 0.0 { *d } else { 0.0 }).collect())
        .collect();
    SampledFunction::new(u.grid().clone(), comps[0].clone())?.with_gradient(comps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalClass {
    Interior,
    TouchesLeftBoundary,
    TouchesRightBoundary,
    WholeDomain,
}

/// How a boundary-touching interval is handled on a finite interval domain:
/// long intervals (at least a quarter of the domain) directly, short ones by
/// comparison with the complementary interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCase {
    Long,
    Short,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignInterval {
    pub a: f64,
    pub b: f64,
    pub class: IntervalClass,
    /// Index range of the nodes with `u > 0`, inclusive.
    #[serde(skip)]
    pub nodes: (usize, usize),
    #[serde(skip)]
    pub case: Option<BoundaryCase>,
}

impl SignInterval {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }
}

/// Maximal runs of `{u > 0}`, in increasing order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignDecomposition {
    pub intervals: Vec<SignInterval>,
}

impl SignDecomposition {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Whether the node with index `k` lies in some reported run.
    pub fn covers_node(&self, k: usize) -> bool {
        self.intervals.iter().any(|iv| iv.nodes.0 <= k && k <= iv.nodes.1)
    }
}

/// Decomposes `{u > 0}` on a 1D grid. Interior endpoints are placed at the
/// linear-interpolation zero between the bracketing nodes.
pub fn sign_decompose(u: &SampledFunction) -> Result<SignDecomposition> {
    let g = match u.grid() {
        Grid::One(g) => g,
        Grid::Two(_) => return Err(Error::Input("sign decomposition needs a 1D grid".into())),
    };
    let v = u.values();
    let n = v.len();
    let x = g.nodes();
    let (lo, hi) = (g.interval.a, g.interval.b);
    let zero_between = |i: usize, j: usize| {
        let (ui, uj) = (v[i], v[j]);
        if ui == uj {
            0.5 * (x[i] + x[j])
        } else {
            x[i] + (x[j] - x[i]) * ui / (ui - uj)
        }
    };

    let mut intervals = Vec::new();
    let mut k = 0;
    while k < n {
        if v[k] <= 0.0 {
            k += 1;
            continue;
        }
        let start = k;
        while k < n && v[k] > 0.0 {
            k += 1;
        }
        let end = k - 1;
        let (a, left) = if start == 0 { (lo, true) } else { (zero_between(start - 1, start), false) };
        let (b, right) = if end == n - 1 { (hi, true) } else { (zero_between(end, end + 1), false) };
        let class = match (left, right) {
            (true, true) => IntervalClass::WholeDomain,
            (true, false) => IntervalClass::TouchesLeftBoundary,
            (false, true) => IntervalClass::TouchesRightBoundary,
            (false, false) => IntervalClass::Interior,
        };
        let case = match class {
            IntervalClass::TouchesLeftBoundary | IntervalClass::TouchesRightBoundary => Some(if b - a >= 0.25 * (hi - lo) {
                BoundaryCase::Long
            } else {
                BoundaryCase::Short
            }),
            _ => None,
        };
        intervals.push(SignInterval { a, b, class, nodes: (start, end), case });
    }
    Ok(SignDecomposition { intervals })
}
