use super::family::FunctionSpec;
use super::grid::Grid;
use crate::error::{Error, Result};

/// A point in the plane; 1D quantities use the first coordinate only.
pub type Point = [f64; 2];

/// Anything that can be evaluated pointwise with a gradient.
pub trait Field: Sync {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
}

/// Nodal values on the active nodes of a grid, with an optional gradient
/// stored component-major (`gradient[c][node]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    gradient: Option<Vec<Vec<f64>>>,
}

impl SampledFunction {
    pub fn new(grid: impl Into<Grid>, values: Vec<f64>) -> Result<Self> {
        let grid = grid.into();
        if values.len() != grid.active_count() {
            return Err(Error::Input(format!(
                "{} values for {} active nodes",
                values.len(),
                grid.active_count()
            )));
        }
        Ok(Self { grid, values, gradient: None })
    }

    pub fn with_gradient(mut self, gradient: Vec<Vec<f64>>) -> Result<Self> {
        if gradient.len() != self.grid.dim() || gradient.iter().any(|c| c.len() != self.values.len()) {
            return Err(Error::Input(format!(
                "gradient must have {} components of length {}",
                self.grid.dim(),
                self.values.len()
            )));
        }
        self.gradient = Some(gradient);
        Ok(self)
    }

    pub fn without_gradient(mut self) -> Self {
        self.gradient = None;
        self
    }

    /// Samples any [`Field`] at the active nodes, gradient included.
    pub fn from_field(field: &dyn Field, grid: impl Into<Grid>) -> Self {
        let grid = grid.into();
        let pts = grid.points();
        let dim = grid.dim();
        let values = pts.iter().map(|&p| field.value(p)).collect();
        let mut gradient = vec![Vec::with_capacity(pts.len()); dim];
        for &p in &pts {
            let g = field.gradient(p);
            for (c, comp) in gradient.iter_mut().enumerate() {
                comp.push(g[c]);
            }
        }
        Self { grid, values, gradient: Some(gradient) }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gradient(&self) -> Option<&[Vec<f64>]> {
        self.gradient.as_deref()
    }

    pub fn require_gradient(&self) -> Result<&[Vec<f64>]> {
        self.gradient()
            .ok_or_else(|| Error::Input("operation needs a gradient but the sampled function has none".into()))
    }

    /// One gradient component as a scalar field on the same grid.
    pub fn gradient_component(&self, c: usize) -> Result<SampledFunction> {
        let g = self.require_gradient()?;
        let comp = g
            .get(c)
            .ok_or_else(|| Error::Input(format!("gradient component {c} out of range")))?;
        SampledFunction::new(self.grid.clone(), comp.clone())
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            gradient: None,
        }
    }

    pub fn scaled(&self, lambda: f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| lambda * v).collect(),
            gradient: self
                .gradient
                .as_ref()
                .map(|g| g.iter().map(|c| c.iter().map(|v| lambda * v).collect()).collect()),
        }
    }

    /// Squared L2 norm by the midpoint rule.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.cell_measure() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    /// Squared L2 norm of the gradient (all components).
    pub fn gradient_l2_norm_sq(&self) -> Result<f64> {
        let g = self.require_gradient()?;
        Ok(self.grid.cell_measure() * g.iter().flatten().map(|v| v * v).sum::<f64>())
    }

    pub fn integral(&self) -> f64 {
        self.grid.cell_measure() * crate::numeric::neumaier_sum(self.values.iter().copied())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Replaces the gradient with centred differences (one-sided next to the
    /// grid edge or an inactive neighbour).
    pub fn with_fd_gradient(mut self) -> SampledFunction {
        let gradient = match &self.grid {
            Grid::One(g) => {
                let h = g.h();
                let v = &self.values;
                let n = v.len();
                let d = (0..n)
                    .map(|k| match (k, n) {
                        (_, 1) => 0.0,
                        (0, _) => (v[1] - v[0]) / h,
                        (k, n) if k == n - 1 => (v[k] - v[k - 1]) / h,
                        (k, _) => (v[k + 1] - v[k - 1]) / (2.0 * h),
                    })
                    .collect();
                vec![d]
            }
            Grid::Two(g) => {
                let (h1, h2) = (g.h1(), g.h2());
                let mut gx = Vec::with_capacity(self.values.len());
                let mut gy = Vec::with_capacity(self.values.len());
                for &idx in g.active() {
                    let (i, j) = (idx % g.nx, idx / g.nx);
                    let at = |ii: isize, jj: isize| -> Option<f64> {
                        if ii < 0 || jj < 0 || ii as usize >= g.nx || jj as usize >= g.ny {
                            return None;
                        }
                        g.rank_of(ii as usize, jj as usize).map(|r| self.values[r])
                    };
                    let c = self.values[g.rank_of(i, j).unwrap()];
                    let diff = |lo: Option<f64>, hi: Option<f64>, h: f64| match (lo, hi) {
                        (Some(a), Some(b)) => (b - a) / (2.0 * h),
                        (None, Some(b)) => (b - c) / h,
                        (Some(a), None) => (c - a) / h,
                        (None, None) => 0.0,
                    };
                    let (ii, jj) = (i as isize, j as isize);
                    gx.push(diff(at(ii - 1, jj), at(ii + 1, jj), h1));
                    gy.push(diff(at(ii, jj - 1), at(ii, jj + 1), h2));
                }
                vec![gx, gy]
            }
        };
        self.gradient = Some(gradient);
        self
    }
}

/// Samples a function family at the active nodes of a grid. Values are exact
/// pointwise evaluations; gradients come from the family's analytic formula.
pub fn sample(spec: &FunctionSpec, grid: impl Into<Grid>) -> Result<SampledFunction> {
    let grid = grid.into();
    spec.check_covers(&grid)?;
    let compiled = spec.compile(grid.dim())?;
    Ok(SampledFunction::from_field(&compiled, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{Family, Grid1D, Grid2D, Interval, Region};

    fn unit_grid(n: usize) -> Grid1D {
        Grid1D::new(Interval::unit(), n).unwrap()
    }

    #[test]
    fn linear_midpoints() {
        let spec = FunctionSpec::new(Family::Linear { slope: 1.0, intercept: 0.0, slope2: 0.0 });
        let f = sample(&spec, unit_grid(4)).unwrap();
        assert_eq!(f.values(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(f.gradient().unwrap()[0], vec![1.0; 4]);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let spec = FunctionSpec::new(Family::Constant { value: 1.0 });
        let g = Grid2D::new(Interval::new(-1.0, 1.0).unwrap(), Interval::new(-1.0, 1.0).unwrap(), 9, 9, Region::unit_disk()).unwrap();
        let f = sample(&spec, g).unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));
        assert!(f.gradient().unwrap().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn plateau_sampling() {
        let f = sample(&FunctionSpec::new(Family::Plateau { n: 8 }), unit_grid(1024)).unwrap();
        let g = f.grid().points();
        for (k, &v) in f.values().iter().enumerate() {
            let x = g[k][0];
            if (0.125..=0.875).contains(&x) {
                assert_eq!(v, 1.0);
            }
            if x <= 1.0 / 16.0 || x >= 15.0 / 16.0 {
                assert_eq!(v, 0.0);
            }
        }
        // monotone ramps, slope bounded by 1.5 * 2n
        assert!(f.values()[..512].windows(2).all(|w| w[0] <= w[1]));
        assert!(f.values()[512..].windows(2).all(|w| w[0] >= w[1]));
        assert!(f.gradient().unwrap()[0].iter().all(|d| d.abs() <= 24.0 + 1e-12));
    }

    #[test]
    fn plateau_outside_unit_interval_is_rejected() {
        let g = Grid1D::new(Interval::new(-1.0, 1.0).unwrap(), 8).unwrap();
        assert!(matches!(sample(&FunctionSpec::new(Family::Plateau { n: 4 }), g), Err(Error::Domain(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = FunctionSpec::seeded(Family::RandomTrig { degree: 9, period: 1.0, decay: 1.0 }, 99);
        let a = sample(&spec, unit_grid(300)).unwrap();
        let b = sample(&spec, unit_grid(300)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fd_gradient_close_to_analytic() {
        let spec = FunctionSpec::new(Family::Sine { amplitude: 1.0, frequency: 1.0, phase: 0.0 });
        let f = sample(&spec, unit_grid(400)).unwrap();
        let exact = f.gradient().unwrap()[0].clone();
        let fd = f.clone().with_fd_gradient();
        let err = exact
            .iter()
            .zip(&fd.gradient().unwrap()[0])
            .skip(1)
            .take(398)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-3);
    }
}
