//! Geometric substrate: intervals, cell-centred grids, graph domains in the
//! plane and scalar fields sampled on them.

mod curve;
mod family;
mod graph;
mod grid;
mod sampled;

pub use curve::Curve;
pub use family::{Family, FunctionSpec};
pub use graph::{build_graph_domain, GraphDomain2D, GraphKind, GraphParams};
pub use grid::{Grid, Grid1D, Grid2D, Interval, Region};
pub use sampled::{sample, Field, Point, SampledFunction};

use crate::error::{Error, Result};

/// Distance from `x` to the complement of an interval, `min(x - a, b - x)`.
pub fn distance_to_complement(x: f64, interval: &Interval) -> Result<f64> {
    if !interval.contains(x) {
        return Err(Error::Domain(format!(
            "point {x} is not inside ({}, {})",
            interval.a, interval.b
        )));
    }
    Ok((x - interval.a).min(interval.b - x))
}

/// Distance from a planar point to the complement of a region.
pub fn distance_to_complement_2d(p: Point, region: &Region) -> Result<f64> {
    if !region.contains(p) {
        return Err(Error::Domain(format!("point {p:?} is not inside the region")));
    }
    Ok(region.boundary_distance(p))
}
