use serde::{Deserialize, Serialize};

use super::curve::Curve;
use super::grid::Interval;
use super::sampled::Point;
use crate::error::{Error, Result};
use crate::numeric::bisect;

/// Which of the model graph regions a domain represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// `{|y1| < 1, 0 <= y2 < f(y1)}`
    QPlus,
    /// `{|y1| < 1, -f(y1) < y2 < 0}`
    QMinus,
    /// `{|y1| < 1, |y2| < f(y1)}`
    Q,
    /// `{|x| < r0, x2 > g(x1)}` with `g(0) = 0`, described as
    /// `{x_- < x1 < x_+, g(x1) < x2 < sqrt(r0^2 - x1^2)}`.
    DiskCap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphParams {
    /// Base interval for the `Q` kinds; ignored for `DiskCap`.
    pub base: Interval,
    pub r0: Option<f64>,
    /// Margin `delta_0` between the compact core and the non-flat boundary.
    pub core_margin: f64,
    /// Bound on second differences accepted as evidence of a C^2 curve.
    pub c2_bound: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            base: Interval { a: -1.0, b: 1.0 },
            r0: None,
            core_margin: 0.1,
            c2_bound: 1e3,
        }
    }
}

/// Region between two curves over a base interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDomain2D {
    pub kind: GraphKind,
    pub base: Interval,
    pub lower: Curve,
    pub upper: Curve,
    pub r0: Option<f64>,
    pub core_margin: f64,
}

impl GraphDomain2D {
    pub fn contains(&self, p: Point) -> bool {
        self.base.contains(p[0]) && self.lower.value(p[0]) < p[1] && p[1] < self.upper.value(p[0])
    }

    /// Membership in the compact core (`K` for the `Q` kinds, `F_0` for the
    /// disk-capped kind). The flat side `x2 = 0` of `Q+` belongs to the core.
    pub fn in_core(&self, p: Point) -> bool {
        let m = self.core_margin;
        let x1_ok = self.base.a + m < p[0] && p[0] < self.base.b - m;
        if !x1_ok {
            return false;
        }
        let lo = self.lower.value(p[0]);
        let hi = self.upper.value(p[0]);
        match self.kind {
            GraphKind::QPlus | GraphKind::DiskCap => lo <= p[1] && p[1] < hi - m,
            GraphKind::QMinus => lo + m < p[1] && p[1] <= hi,
            GraphKind::Q => lo + m < p[1] && p[1] < hi - m,
        }
    }

    /// Approximate distance to the boundary via a dense boundary polyline.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        let samples = 2000;
        let (a, b) = (self.base.a, self.base.b);
        let mut best = f64::INFINITY;
        let mut seg = |q0: Point, q1: Point| {
            let d = [q1[0] - q0[0], q1[1] - q0[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let t = if len2 == 0.0 {
                0.0
            } else {
                (((p[0] - q0[0]) * d[0] + (p[1] - q0[1]) * d[1]) / len2).clamp(0.0, 1.0)
            };
            let c = [q0[0] + t * d[0] - p[0], q0[1] + t * d[1] - p[1]];
            best = best.min(c[0].hypot(c[1]));
        };
        for curve in [&self.lower, &self.upper] {
            let mut prev = [a, curve.value(a)];
            for k in 1..=samples {
                let x = a + (b - a) * k as f64 / samples as f64;
                let cur = [x, curve.value(x)];
                seg(prev, cur);
                prev = cur;
            }
        }
        seg([a, self.lower.value(a)], [a, self.upper.value(a)]);
        seg([b, self.lower.value(b)], [b, self.upper.value(b)]);
        best
    }

    /// Bounding box `[x0, x1] x [y0, y1]` estimated from curve samples.
    pub fn bounding_box(&self) -> [f64; 4] {
        let (a, b) = (self.base.a, self.base.b);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..=1000 {
            let x = a + (b - a) * k as f64 / 1000.0;
            lo = lo.min(self.lower.value(x));
            hi = hi.max(self.upper.value(x));
        }
        [a, b, lo, hi]
    }
}

/// Builds one of the model graph domains and verifies its geometry.
///
/// For the `Q` kinds `curve` is the positive profile `f`; for `DiskCap` it is
/// the boundary curve `g` with `g(0) = 0`, and the base interval is found as
/// the intersection abscissas of `g` with the circle of radius `r0`.
pub fn build_graph_domain(curve: Curve, kind: GraphKind, params: &GraphParams) -> Result<GraphDomain2D> {
    let (base, lower, upper, r0) = match kind {
        GraphKind::QPlus => (params.base, Curve::flat(), curve, None),
        GraphKind::QMinus => (params.base, curve.negated(), Curve::flat(), None),
        GraphKind::Q => (params.base, curve.clone().negated(), curve, None),
        GraphKind::DiskCap => {
            let r0 = params
                .r0
                .ok_or_else(|| Error::Geometry("disk-capped domain requires r0".into()))?;
            if !(r0 > 0.0) {
                return Err(Error::Geometry(format!("r0 must be positive, got {r0}")));
            }
            if curve.value(0.0).abs() > 1e-12 {
                return Err(Error::Geometry(format!(
                    "boundary curve must pass through the origin, g(0) = {}",
                    curve.value(0.0)
                )));
            }
            let gap = |x: f64| curve.value(x) - (r0 * r0 - x * x).max(0.0).sqrt();
            let x_plus = bisect(gap, 0.0, r0, 1e-13)
                .ok_or_else(|| Error::Geometry("no intersection of the curve with the circle for x > 0".into()))?;
            let x_minus = bisect(gap, -r0, 0.0, 1e-13)
                .ok_or_else(|| Error::Geometry("no intersection of the curve with the circle for x < 0".into()))?;
            (Interval::new(x_minus, x_plus)?, curve, Curve::Circle { radius: r0 }, Some(r0))
        }
    };

    let check_c2 = |c: &Curve, name: &str| -> Result<()> {
        let bound = c.max_second_difference(base.a, base.b, 400);
        if !(bound <= params.c2_bound) {
            return Err(Error::Geometry(format!(
                "{name} curve second differences {bound:.3e} exceed the C2 bound {:.3e}",
                params.c2_bound
            )));
        }
        Ok(())
    };
    check_c2(&lower, "lower")?;
    if !matches!(upper, Curve::Circle { .. }) {
        check_c2(&upper, "upper")?;
    }

    for k in 0..=1000 {
        let x = base.a + base.len() * (k as f64 + 0.5) / 1001.0;
        let (lo, hi) = (lower.value(x), upper.value(x));
        if !(lo < hi) {
            return Err(Error::Geometry(format!("boundary curves cross at x1 = {x}: {lo} >= {hi}")));
        }
    }

    Ok(GraphDomain2D { kind, base, lower, upper, r0, core_margin: params.core_margin })
}
