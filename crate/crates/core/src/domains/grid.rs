use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::graph::GraphDomain2D;
use super::sampled::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr", into = "IntervalRepr")]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    a: f64,
    b: f64,
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = Error;
    fn try_from(r: IntervalRepr) -> Result<Self> {
        Interval::new(r.a, r.b)
    }
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> Self {
        IntervalRepr { a: i.a, b: i.b }
    }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Domain(format!("interval requires a < b, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    /// Open-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// Uniform cell-centred grid: `n` cells of width `h = |I| / n`, one node per
/// cell midpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Grid1DRepr", into = "Grid1DRepr")]
pub struct Grid1D {
    pub interval: Interval,
    pub n: usize,
}

#[derive(Serialize, Deserialize)]
struct Grid1DRepr {
    a: f64,
    b: f64,
    n: usize,
}

impl TryFrom<Grid1DRepr> for Grid1D {
    type Error = Error;
    fn try_from(r: Grid1DRepr) -> Result<Self> {
        Grid1D::new(Interval::new(r.a, r.b)?, r.n)
    }
}

impl From<Grid1D> for Grid1DRepr {
    fn from(g: Grid1D) -> Self {
        Grid1DRepr { a: g.interval.a, b: g.interval.b, n: g.n }
    }
}

impl Grid1D {
    pub fn new(interval: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("grid needs at least one cell".into()));
        }
        Ok(Self { interval, n })
    }

    pub fn h(&self) -> f64 {
        self.interval.len() / self.n as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.interval.a + (k as f64 + 0.5) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    /// Same spacing over `interval` dilated about its midpoint so that the
    /// original nodes are a contiguous run of the new ones. Returns the new
    /// grid and the index offset of the original first node.
    pub fn padded(&self, cells_each_side: usize) -> (Grid1D, usize) {
        let h = self.h();
        let pad = cells_each_side as f64 * h;
        let interval = Interval { a: self.interval.a - pad, b: self.interval.b + pad };
        (Grid1D { interval, n: self.n + 2 * cells_each_side }, cells_each_side)
    }
}

/// Planar region used to mask a tensor grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// The whole bounding box of the grid.
    Box,
    Disk { center: [f64; 2], radius: f64 },
    Graph(GraphDomain2D),
}

impl Region {
    pub fn unit_disk() -> Self {
        Region::Disk { center: [0.0, 0.0], radius: 1.0 }
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Box => true,
            Region::Disk { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                (dx * dx + dy * dy).sqrt() < *radius
            }
            Region::Graph(g) => g.contains(p),
        }
    }

    /// Distance to the region boundary for points inside. Boxes have no
    /// intrinsic geometry here, so they report infinity.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match self {
            Region::Box => f64::INFINITY,
            Region::Disk { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                radius - (dx * dx + dy * dy).sqrt()
            }
            Region::Graph(g) => g.boundary_distance(p),
        }
    }
}

/// Tensor grid of cell midpoints over a box, with a membership mask.
///
/// Nodes are stored row-major, `index = j * nx + i`, with `i` along `x` and
/// `j` along `y`. Values of a [`SampledFunction`](super::SampledFunction) are
/// indexed by active rank, in increasing full-index order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Grid2DRepr", into = "Grid2DRepr")]
pub struct Grid2D {
    pub x: Interval,
    pub y: Interval,
    pub nx: usize,
    pub ny: usize,
    pub region: Region,
    mask: Vec<bool>,
    active: Vec<usize>,
    rank: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct Grid2DRepr {
    x: Interval,
    y: Interval,
    nx: usize,
    ny: usize,
    region: Region,
}

impl TryFrom<Grid2DRepr> for Grid2D {
    type Error = Error;
    fn try_from(r: Grid2DRepr) -> Result<Self> {
        Grid2D::new(r.x, r.y, r.nx, r.ny, r.region)
    }
}

impl From<Grid2D> for Grid2DRepr {
    fn from(g: Grid2D) -> Self {
        Grid2DRepr { x: g.x, y: g.y, nx: g.nx, ny: g.ny, region: g.region }
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x
            && self.y == other.y
            && self.nx == other.nx
            && self.ny == other.ny
            && self.region == other.region
    }
}

pub(crate) const INACTIVE: u32 = u32::MAX;

impl Grid2D {
    pub fn new(x: Interval, y: Interval, nx: usize, ny: usize, region: Region) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Parameter("grid needs at least one cell per axis".into()));
        }
        let h1 = x.len() / nx as f64;
        let h2 = y.len() / ny as f64;
        let mut mask = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let p = [x.a + (i as f64 + 0.5) * h1, y.a + (j as f64 + 0.5) * h2];
                mask.push(region.contains(p));
            }
        }
        Self::from_mask(x, y, nx, ny, region, mask)
    }

    /// Like [`Grid2D::new`], additionally dropping nodes with `keep(i, j)`
    /// false. The filter is not serialized.
    pub fn new_filtered(
        x: Interval,
        y: Interval,
        nx: usize,
        ny: usize,
        region: Region,
        keep: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let g = Self::new(x, y, nx, ny, region)?;
        let mask = (0..nx * ny).map(|idx| g.mask[idx] && keep(idx % nx, idx / nx)).collect();
        Self::from_mask(g.x, g.y, nx, ny, g.region, mask)
    }

    pub fn full_box(x: Interval, y: Interval, nx: usize, ny: usize) -> Result<Self> {
        Self::new(x, y, nx, ny, Region::Box)
    }

    fn from_mask(x: Interval, y: Interval, nx: usize, ny: usize, region: Region, mask: Vec<bool>) -> Result<Self> {
        let mut active = Vec::new();
        let mut rank = vec![INACTIVE; nx * ny];
        for (idx, &m) in mask.iter().enumerate() {
            if m {
                rank[idx] = active.len() as u32;
                active.push(idx);
            }
        }
        if active.is_empty() {
            return Err(Error::Domain("no grid node lies inside the region".into()));
        }
        Ok(Self { x, y, nx, ny, region, mask, active, rank })
    }

    pub fn h1(&self) -> f64 {
        self.x.len() / self.nx as f64
    }

    pub fn h2(&self) -> f64 {
        self.y.len() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.h1() * self.h2()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Full indices of the active nodes, increasing.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    /// Active rank of a full index, if the node is active.
    pub fn rank_of(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.rank[j * self.nx + i];
        (r != INACTIVE).then_some(r as usize)
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        [
            self.x.a + (i as f64 + 0.5) * self.h1(),
            self.y.a + (j as f64 + 0.5) * self.h2(),
        ]
    }

    pub fn node_of_index(&self, idx: usize) -> Point {
        self.node(idx % self.nx, idx / self.nx)
    }

    pub fn active_points(&self) -> Vec<Point> {
        self.active.iter().map(|&idx| self.node_of_index(idx)).collect()
    }

    /// A grid with the same spacing covering at least `[x0, x1] x [y0, y1]`,
    /// aligned so that every node of `self` is also a node of the result.
    /// Returns the grid and the `(i, j)` offset of `self`'s origin cell.
    pub fn aligned_cover(&self, x0: f64, x1: f64, y0: f64, y1: f64, region: Region) -> Result<(Grid2D, usize, usize)> {
        let (h1, h2) = (self.h1(), self.h2());
        let pad = |lo: f64, h: f64| ((lo / h) - 1e-9).ceil().max(0.0) as usize;
        let il = pad(self.x.a - x0, h1);
        let ir = pad(x1 - self.x.b, h1);
        let jl = pad(self.y.a - y0, h2);
        let jr = pad(y1 - self.y.b, h2);
        let x = Interval::new(self.x.a - il as f64 * h1, self.x.b + ir as f64 * h1)?;
        let y = Interval::new(self.y.a - jl as f64 * h2, self.y.b + jr as f64 * h2)?;
        let g = Grid2D::new(x, y, self.nx + il + ir, self.ny + jl + jr, region)?;
        Ok((g, il, jl))
    }
}

/// Either kind of grid, shared cheaply between sampled fields.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    One(Arc<Grid1D>),
    Two(Arc<Grid2D>),
}

impl From<Grid1D> for Grid {
    fn from(g: Grid1D) -> Self {
        Grid::One(Arc::new(g))
    }
}

impl From<Grid2D> for Grid {
    fn from(g: Grid2D) -> Self {
        Grid::Two(Arc::new(g))
    }
}

impl Grid {
    pub fn dim(&self) -> usize {
        match self {
            Grid::One(_) => 1,
            Grid::Two(_) => 2,
        }
    }

    pub fn active_count(&self) -> usize {
        match self {
            Grid::One(g) => g.n,
            Grid::Two(g) => g.active_count(),
        }
    }

    /// Length or area of one cell.
    pub fn cell_measure(&self) -> f64 {
        match self {
            Grid::One(g) => g.h(),
            Grid::Two(g) => g.cell_area(),
        }
    }

    /// Coordinates of the active nodes; 1D nodes carry `0.0` as second entry.
    pub fn points(&self) -> Vec<Point> {
        match self {
            Grid::One(g) => g.nodes().into_iter().map(|x| [x, 0.0]).collect(),
            Grid::Two(g) => g.active_points(),
        }
    }

    /// Resolution label: cells for 1D, cells along `x` for 2D.
    pub fn resolution(&self) -> usize {
        match self {
            Grid::One(g) => g.n,
            Grid::Two(g) => g.nx,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoints_avoid_endpoints() {
        let g = Grid1D::new(Interval::unit(), 7).unwrap();
        let nodes = g.nodes();
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(nodes.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!((g.node(0) - 0.5 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn bad_interval_rejected() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
    }

    #[test]
    fn disk_mask_counts() {
        let g = Grid2D::new(Interval::new(-1.0, 1.0).unwrap(), Interval::new(-1.0, 1.0).unwrap(), 64, 64, Region::unit_disk()).unwrap();
        let frac = g.active_count() as f64 * g.cell_area();
        assert!((frac - std::f64::consts::PI).abs() < 0.1);
        for p in g.active_points() {
            assert!(p[0].hypot(p[1]) < 1.0);
        }
    }

    #[test]
    fn aligned_cover_keeps_nodes() {
        let g = Grid2D::new(Interval::new(-1.0, 1.0).unwrap(), Interval::new(-1.0, 1.0).unwrap(), 32, 32, Region::unit_disk()).unwrap();
        let (big, i0, j0) = g.aligned_cover(-1.25, 1.25, -1.25, 1.25, Region::Box).unwrap();
        assert_eq!(big.nx, 40);
        let a = g.node(3, 5);
        let b = big.node(3 + i0, 5 + j0);
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    }

    #[test]
    fn grid_json_round_trip() {
        let g = Grid1D::new(Interval::new(-0.5, 2.0).unwrap(), 33).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"a":-0.5,"b":2.0,"n":33}"#);
        assert_eq!(serde_json::from_str::<Grid1D>(&s).unwrap(), g);
        let g2 = Grid2D::new(Interval::new(-1.0, 1.0).unwrap(), Interval::new(0.0, 1.0).unwrap(), 8, 4, Region::unit_disk()).unwrap();
        let back: Grid2D = serde_json::from_str(&serde_json::to_string(&g2).unwrap()).unwrap();
        assert_eq!(back, g2);
        assert_eq!(back.active(), g2.active());
    }
}
