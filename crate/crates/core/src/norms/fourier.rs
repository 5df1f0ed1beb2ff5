//! Fourier-side quadratic forms, used as an independent check of the pair sums
//! and as the `<(-Delta)^s u, u>` form.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::domains::{Grid, Region, SampledFunction};
use crate::error::{Error, Result};
use crate::numeric::{integrate, neumaier_sum};

/// `sum_xi |xi|^(2 sigma) |f^(xi)|^2` for a field on a uniform periodic grid,
/// with coefficients normalized so that `sum |f^|^2 = ||f||_{L2}^2` and
/// frequencies `2 pi k / L` for the grid's period `L`.
///
/// For a field extended by zero outside its period, the whole-space Gagliardo
/// seminorm equals `2 C(d, gamma)` times this value at `sigma = gamma`.
pub fn fourier_seminorm_sq(f: &SampledFunction, sigma: f64) -> Result<f64> {
    let mut planner = FftPlanner::new();
    match f.grid() {
        Grid::One(g) => {
            let n = g.n;
            let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
            planner.plan_fft_forward(n).process(&mut buf);
            let base = 2.0 * PI / g.interval.len();
            let scale = g.h() / n as f64;
            Ok(neumaier_sum(buf.iter().enumerate().map(|(k, c)| {
                let xi = base * signed_index(k, n) as f64;
                symbol(xi.abs(), sigma) * c.norm_sqr() * scale
            })))
        }
        Grid::Two(g) => {
            if g.region != Region::Box {
                return Err(Error::Input("Fourier form needs a uniform periodic box grid, not a masked grid".into()));
            }
            let (nx, ny) = (g.nx, g.ny);
            let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let fx = planner.plan_fft_forward(nx);
            let fy = planner.plan_fft_forward(ny);
            for row in buf.chunks_exact_mut(nx) {
                fx.process(row);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); ny];
            for i in 0..nx {
                for j in 0..ny {
                    col[j] = buf[j * nx + i];
                }
                fy.process(&mut col);
                for j in 0..ny {
                    buf[j * nx + i] = col[j];
                }
            }
            let (bx, by) = (2.0 * PI / g.x.len(), 2.0 * PI / g.y.len());
            let scale = g.cell_area() / (nx * ny) as f64;
            Ok(neumaier_sum(buf.iter().enumerate().map(|(idx, c)| {
                let xi1 = bx * signed_index(idx % nx, nx) as f64;
                let xi2 = by * signed_index(idx / nx, ny) as f64;
                symbol(xi1.hypot(xi2), sigma) * c.norm_sqr() * scale
            })))
        }
    }
}

fn signed_index(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn symbol(abs_xi: f64, sigma: f64) -> f64 {
    if abs_xi == 0.0 {
        if sigma == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        abs_xi.powf(2.0 * sigma)
    }
}

/// `int_0^inf (1 - cos t) / t^(1 + 2 gamma) dt`.
fn half_line_constant(gamma: f64) -> Result<f64> {
    let p = 1.0 + 2.0 * gamma;
    // On [0, 1] write (1 - cos t) / t^p = t^(1 - 2 gamma) sinc^2(t/2) / 2 and
    // integrate the power part exactly, leaving a regular integrand.
    let sinc_sq_minus_one = |h: f64| {
        if h < 1e-3 {
            let h2 = h * h;
            -h2 / 3.0 + 2.0 * h2 * h2 / 45.0
        } else {
            let s = h.sin() / h;
            s * s - 1.0
        }
    };
    let regular = integrate(|t| 0.5 * t.powf(2.0 - p) * sinc_sq_minus_one(0.5 * t), 0.0, 1.0, 1e-15, 1e-13)?.value;
    let head = 0.5 / (2.0 - 2.0 * gamma) + regular;
    // int_1^inf cos t t^-q dt, reduced twice by parts to an absolutely
    // convergent integrand ~ t^-(q+4), then integrated out to where the tail
    // is below 1e-12.
    let cos_tail = |q: f64| -> Result<f64> {
        let remainder_q = q + 4.0;
        let mut acc = 0.0;
        let mut lo = 1.0;
        let upper = 1.0 + 128.0 * PI;
        while lo < upper {
            let hi = (lo + PI).min(upper);
            acc += integrate(|t| t.cos() / t.powf(remainder_q), lo, hi, 1e-16, 1e-13)?.value;
            lo = hi;
        }
        let (s1, c1) = (1f64.sin(), 1f64.cos());
        // C(q) = -sin1 + q cos1 - q(q+1) C(q+2)
        let c_q2 = -s1 + (q + 2.0) * c1 - (q + 2.0) * (q + 3.0) * acc;
        Ok(-s1 + q * c1 - q * (q + 1.0) * c_q2)
    };
    let tail = 1.0 / (2.0 * gamma) - cos_tail(p)?;
    Ok(head + tail)
}

/// `C(d, gamma) = int_{R^d} (1 - cos(z . e1)) / |z|^(d + 2 gamma) dz`.
pub fn gagliardo_fourier_constant(d: usize, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Parameter(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if !(1e-3..=1.0 - 1e-3).contains(&gamma) {
        return Err(Error::NearDivergence(format!("C(d, gamma) diverges as gamma -> 0 or 1; got {gamma}")));
    }
    let radial = half_line_constant(gamma)?;
    match d {
        1 => Ok(2.0 * radial),
        2 => {
            // C(2, gamma) = int_0^{2 pi} |cos t|^{2 gamma} dt * radial
            let angular = 4.0 * integrate(|t| t.cos().powf(2.0 * gamma), 0.0, 0.5 * PI, 1e-15, 1e-14)?.value;
            Ok(angular * radial)
        }
        _ => Err(Error::Unsupported(format!("dimension {d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{sample, Family, FunctionSpec, Grid1D, Interval};

    #[test]
    fn constant_half_gamma_is_pi() {
        let c = gagliardo_fourier_constant(1, 0.5).unwrap();
        assert!((c - PI).abs() < 1e-9 * PI, "{c}");
    }

    #[test]
    fn golden_constants() {
        // arbitrary-precision quadrature values
        let c1 = gagliardo_fourier_constant(1, 0.25).unwrap();
        assert!((c1 - 5.013_256_549_262_001).abs() < 1e-8, "{c1}");
        let c2 = gagliardo_fourier_constant(2, 0.25).unwrap();
        assert!((c2 - 12.013_168_757_445_038).abs() < 1e-7, "{c2}");
    }

    #[test]
    fn matches_gamma_function_closed_form() {
        for gamma in [0.1, 0.25, 0.4, 0.6, 0.75, 0.9] {
            let closed = 2.0 * statrs::function::gamma::gamma(1.0 - 2.0 * gamma) * (PI * gamma).cos() / (2.0 * gamma);
            let c = gagliardo_fourier_constant(1, gamma).unwrap();
            assert!((c - closed).abs() < 1e-9 * closed, "{gamma}: {c} vs {closed}");
        }
        let c = gagliardo_fourier_constant(2, 0.4).unwrap();
        assert!((c - 7.571_185_388_774_128).abs() < 1e-8);
        let c = gagliardo_fourier_constant(2, 0.9).unwrap();
        assert!((c - 9.915_730_189_148_869).abs() < 1e-8);
        assert!((gagliardo_fourier_constant(2, 0.5).unwrap() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn constant_grows_toward_one() {
        let a = gagliardo_fourier_constant(1, 0.9).unwrap();
        let b = gagliardo_fourier_constant(1, 0.999).unwrap();
        assert!(b > a);
        assert!(matches!(gagliardo_fourier_constant(1, 0.9995), Err(Error::NearDivergence(_))));
        assert!(matches!(gagliardo_fourier_constant(1, 0.0005), Err(Error::NearDivergence(_))));
    }

    #[test]
    fn single_mode() {
        let l = 2.0;
        let g = Grid1D::new(Interval::new(0.0, l).unwrap(), 256).unwrap();
        let f = sample(&FunctionSpec::new(Family::Sine { amplitude: 1.0, frequency: 1.0 / l, phase: 0.0 }), g).unwrap();
        for sigma in [0.25, 0.7, 1.3] {
            let v = fourier_seminorm_sq(&f, sigma).unwrap();
            let expected = (2.0 * PI / l).powf(2.0 * sigma) * f.l2_norm_sq();
            assert!((v - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn constant_has_no_mass_off_zero() {
        let g = Grid1D::new(Interval::unit(), 64).unwrap();
        let f = sample(&FunctionSpec::new(Family::Constant { value: 3.0 }), g).unwrap();
        assert!(fourier_seminorm_sq(&f, 0.4).unwrap().abs() < 1e-20);
    }
}
