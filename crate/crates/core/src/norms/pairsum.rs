//! Midpoint pair sums for the Gagliardo double integral.
//!
//! Same-cell pairs are excluded; every other ordered pair of active nodes
//! contributes `(f(x) - f(y))^2 / |x - y|^(d + 2 gamma)` times the squared cell
//! measure. Work is split into fixed row blocks whose partial sums are combined
//! in block order, so the result does not depend on the worker count.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::domains::{Grid, Grid1D, Grid2D, Region};
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, neumaier_sum};

/// Largest active-node count accepted by the direct O(N^2) sum.
pub const DIRECT_NODE_CAP: usize = 100_000;
/// Largest active-node count accepted by the convolution route.
pub const CONVOLUTION_NODE_CAP: usize = 1_000_000;
/// Direct summation is used in 2D up to this many active nodes under `Auto`.
const AUTO_DIRECT_LIMIT_2D: usize = 3_000;
const ROW_BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSumMethod {
    /// 1D: always direct. 2D: direct for small grids, convolution otherwise.
    Auto,
    Direct,
    /// Exact rewrite of the same discrete sum as FFT convolutions (2D only).
    Convolution,
}

pub(crate) fn pair_sum(grid: &Grid, values: &[f64], gamma: f64, method: PairSumMethod) -> Result<f64> {
    match grid {
        Grid::One(g) => {
            if method == PairSumMethod::Convolution {
                return Err(Error::Unsupported("convolution pair sums are implemented for 2D grids".into()));
            }
            if g.n > DIRECT_NODE_CAP {
                return Err(Error::Resolution(format!("{} nodes exceed the direct-sum cap {DIRECT_NODE_CAP}", g.n)));
            }
            Ok(direct_1d(g, values, gamma))
        }
        Grid::Two(g) => {
            let n = g.active_count();
            let use_direct = match method {
                PairSumMethod::Direct => true,
                PairSumMethod::Convolution => false,
                PairSumMethod::Auto => n <= AUTO_DIRECT_LIMIT_2D,
            };
            if use_direct {
                if n > DIRECT_NODE_CAP {
                    return Err(Error::Resolution(format!("{n} active nodes exceed the direct-sum cap {DIRECT_NODE_CAP}")));
                }
                Ok(direct_2d(g, values, gamma))
            } else {
                if n > CONVOLUTION_NODE_CAP {
                    return Err(Error::Resolution(format!("{n} active nodes exceed the cap {CONVOLUTION_NODE_CAP}")));
                }
                Ok(convolution_2d(g, values, gamma))
            }
        }
    }
}

/// Unrolled row accumulation; the lane order is fixed, so the result is a
/// monotone function of the individual terms.
#[inline]
fn row_sum(fi: f64, tail: &[f64], kern: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = tail.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            let d = fi - tail[4 * c + l];
            acc[l] += d * d * kern[4 * c + l];
        }
    }
    let mut rest = 0.0;
    for k in 4 * chunks..tail.len() {
        let d = fi - tail[k];
        rest += d * d * kern[k];
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + rest
}

fn direct_1d(g: &Grid1D, values: &[f64], gamma: f64) -> f64 {
    let n = values.len();
    let h = g.h();
    let p = 1.0 + 2.0 * gamma;
    // kern[k] is the weight for node separation k + 1.
    let kern: Vec<f64> = (1..n.max(1)).map(|k| h * h / (k as f64 * h).powf(p)).collect();
    let blocks = n.div_ceil(ROW_BLOCK);
    let partial: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut s = 0.0;
            for i in b * ROW_BLOCK..((b + 1) * ROW_BLOCK).min(n) {
                s += row_sum(values[i], &values[i + 1..], &kern[..n - i - 1]);
            }
            s
        })
        .collect();
    2.0 * partial.iter().sum::<f64>()
}

fn kernel_table(g: &Grid2D, gamma: f64) -> Vec<f64> {
    let (h1, h2) = (g.h1(), g.h2());
    let area = g.cell_area();
    let p = 1.0 + gamma;
    let mut t = vec![0.0; g.nx * g.ny];
    for dj in 0..g.ny {
        for di in 0..g.nx {
            if di == 0 && dj == 0 {
                continue;
            }
            let r2 = (di as f64 * h1).powi(2) + (dj as f64 * h2).powi(2);
            t[dj * g.nx + di] = area * area / r2.powf(p);
        }
    }
    t
}

fn direct_2d(g: &Grid2D, values: &[f64], gamma: f64) -> f64 {
    let table = kernel_table(g, gamma);
    let nx = g.nx;
    let coords: Vec<(usize, usize)> = g.active().iter().map(|&idx| (idx % nx, idx / nx)).collect();
    let n = values.len();
    let blocks = n.div_ceil(ROW_BLOCK);
    let partial: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut s = 0.0;
            for p in b * ROW_BLOCK..((b + 1) * ROW_BLOCK).min(n) {
                let (ip, jp) = coords[p];
                let fp = values[p];
                let mut row = 0.0;
                for q in p + 1..n {
                    let (iq, jq) = coords[q];
                    let d = fp - values[q];
                    row += d * d * table[jq.abs_diff(jp) * nx + iq.abs_diff(ip)];
                }
                s += row;
            }
            s
        })
        .collect();
    2.0 * partial.iter().sum::<f64>()
}

struct Fft2 {
    px: usize,
    py: usize,
    fwd_x: Arc<dyn rustfft::Fft<f64>>,
    fwd_y: Arc<dyn rustfft::Fft<f64>>,
    inv_x: Arc<dyn rustfft::Fft<f64>>,
    inv_y: Arc<dyn rustfft::Fft<f64>>,
}

impl Fft2 {
    fn new(px: usize, py: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            px,
            py,
            fwd_x: planner.plan_fft_forward(px),
            fwd_y: planner.plan_fft_forward(py),
            inv_x: planner.plan_fft_inverse(px),
            inv_y: planner.plan_fft_inverse(py),
        }
    }

    /// In-place 2D transform of a row-major `py x px` array.
    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let (fx, fy) = if inverse { (&self.inv_x, &self.inv_y) } else { (&self.fwd_x, &self.fwd_y) };
        for row in data.chunks_exact_mut(self.px) {
            fx.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); self.py];
        for i in 0..self.px {
            for j in 0..self.py {
                col[j] = data[j * self.px + i];
            }
            fy.process(&mut col);
            for j in 0..self.py {
                data[j * self.px + i] = col[j];
            }
        }
    }
}

/// `S = 2 sum_p m f^2 (K*m) - 2 sum_p m f (K*(m f))` with `K(0) = 0`, the
/// convolutions done on a zero-padded `2nx x 2ny` torus so that no offset wraps.
fn convolution_2d(g: &Grid2D, values: &[f64], gamma: f64) -> f64 {
    let (nx, ny) = (g.nx, g.ny);
    let (px, py) = (2 * nx, 2 * ny);
    let fft = Fft2::new(px, py);
    let table = kernel_table(g, gamma);

    let mut khat = vec![Complex64::new(0.0, 0.0); px * py];
    for dj in 0..ny {
        for di in 0..nx {
            let k = table[dj * nx + di];
            for (si, sj) in [(di, dj), ((px - di) % px, dj), (di, (py - dj) % py), ((px - di) % px, (py - dj) % py)] {
                khat[sj * px + si] = Complex64::new(k, 0.0);
            }
        }
    }
    fft.run(&mut khat, false);

    // Centre the values; the seminorm is invariant under constant shifts.
    let mean = neumaier_sum(values.iter().copied()) / values.len() as f64;
    let centred: Vec<f64> = values.iter().map(|v| v - mean).collect();

    let convolve = |weights: &dyn Fn(usize) -> f64| -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); px * py];
        for (r, &idx) in g.active().iter().enumerate() {
            let (i, j) = (idx % nx, idx / nx);
            buf[j * px + i] = Complex64::new(weights(r), 0.0);
        }
        fft.run(&mut buf, false);
        for (b, k) in buf.iter_mut().zip(&khat) {
            *b *= k;
        }
        fft.run(&mut buf, true);
        let scale = 1.0 / (px * py) as f64;
        g.active()
            .iter()
            .map(|&idx| buf[(idx / nx) * px + idx % nx].re * scale)
            .collect()
    };
    let k_mask = convolve(&|_| 1.0);
    let k_f = convolve(&|r| centred[r]);
    let a = neumaier_sum(centred.iter().zip(&k_mask).map(|(f, k)| f * f * k));
    let b = neumaier_sum(centred.iter().zip(&k_f).map(|(f, k)| f * k));
    (2.0 * (a - b)).max(0.0)
}

/// Killing-measure weight `w(x) = int_{outside} |x - y|^{-(d + 2 gamma)} dy` at
/// each active node, for extending a field by zero outside its grid domain.
pub(crate) fn exterior_weights(grid: &Grid, gamma: f64) -> Result<Vec<f64>> {
    let q = 2.0 * gamma;
    match grid {
        Grid::One(g) => Ok(g
            .nodes()
            .into_iter()
            .map(|x| ((x - g.interval.a).powf(-q) + (g.interval.b - x).powf(-q)) / q)
            .collect()),
        Grid::Two(g) => match &g.region {
            Region::Box => {
                let (gl_x, gl_w) = gauss_legendre(32);
                let (x0, x1, y0, y1) = (g.x.a, g.x.b, g.y.a, g.y.b);
                Ok(g.active_points()
                    .into_iter()
                    .map(|p| {
                        // (distance to edge, arc endpoints measured from the edge normal)
                        let edges = [
                            (x1 - p[0], (y0 - p[1]).atan2(x1 - p[0]), (y1 - p[1]).atan2(x1 - p[0])),
                            (p[0] - x0, (p[1] - y1).atan2(p[0] - x0), (p[1] - y0).atan2(p[0] - x0)),
                            (y1 - p[1], (p[0] - x1).atan2(y1 - p[1]), (p[0] - x0).atan2(y1 - p[1])),
                            (p[1] - y0, (x0 - p[0]).atan2(p[1] - y0), (x1 - p[0]).atan2(p[1] - y0)),
                        ];
                        let total: f64 = edges
                            .iter()
                            .map(|&(d, lo, hi)| {
                                let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                                let arc: f64 = gl_x.iter().zip(&gl_w).map(|(t, w)| w * (c + r * t).cos().powf(q)).sum();
                                d.powf(-q) * arc * r
                            })
                            .sum();
                        total / q
                    })
                    .collect())
            }
            Region::Disk { center, radius } => {
                let m = 256;
                Ok(g.active_points()
                    .into_iter()
                    .map(|p| {
                        let rel = [p[0] - center[0], p[1] - center[1]];
                        let c = rel[0] * rel[0] + rel[1] * rel[1] - radius * radius;
                        let s: f64 = (0..m)
                            .map(|k| {
                                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                                let b = rel[0] * th.cos() + rel[1] * th.sin();
                                let t = -b + (b * b - c).sqrt();
                                t.powf(-q)
                            })
                            .sum();
                        s * 2.0 * std::f64::consts::PI / m as f64 / q
                    })
                    .collect())
            }
            Region::Graph(_) => Err(Error::Unsupported("exterior weights for graph regions".into())),
        },
    }
}
