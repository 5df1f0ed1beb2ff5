use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::domains::{sample, Family, FunctionSpec, Grid1D, Grid2D, Interval, Region};

fn unit(n: usize) -> Grid1D {
    Grid1D::new(Interval::unit(), n).unwrap()
}

fn linear() -> FunctionSpec {
    FunctionSpec::new(Family::Linear { slope: 1.0, intercept: 0.0, slope2: 0.0 })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn constant_has_zero_seminorm() {
    let f = sample(&FunctionSpec::new(Family::Constant { value: 2.5 }), unit(200)).unwrap();
    assert_eq!(gagliardo_sq(&f, 0.3).unwrap().value_sq, 0.0);
}

#[test]
fn parameter_and_degenerate_errors() {
    let f = sample(&linear(), unit(10)).unwrap();
    assert!(matches!(gagliardo_sq(&f, 0.0), Err(Error::Parameter(_))));
    assert!(matches!(gagliardo_sq(&f, 1.0), Err(Error::Parameter(_))));
    let one = sample(&linear(), unit(1)).unwrap();
    assert!(matches!(gagliardo_sq(&one, 0.5), Err(Error::Degenerate(_))));
}

#[test]
fn linear_extrapolates_to_closed_form() {
    let exact = 8.0 / 15.0;
    let (seq, est) = extrapolate(256, |n| Ok(gagliardo_sq(&sample(&linear(), unit(n))?, 0.25)?.value_sq)).unwrap();
    let est = est.unwrap();
    assert!(seq.windows(2).all(|w| w[0].1 < w[1].1));
    assert!(rel(est.limit, exact) < 5e-3, "{}", est.limit);
}

#[test]
fn indicator_extrapolates_to_closed_form() {
    let exact = 8.0 * (2f64.sqrt() - 1.0);
    let spec = FunctionSpec::new(Family::Indicator { lo: 0.5, hi: 2.0 });
    let (_, est) = extrapolate(512, |n| Ok(gagliardo_sq(&sample(&spec, unit(n))?, 0.25)?.value_sq)).unwrap();
    let est = est.unwrap();
    assert!((est.rate - 0.5).abs() < 0.05);
    assert!(rel(est.limit, exact) < 1e-2, "{}", est.limit);
}

#[test]
fn translation_and_reflection_invariance() {
    let spec = FunctionSpec::seeded(Family::RandomTrig { degree: 6, period: 1.0, decay: 1.0 }, 5);
    let f = sample(&spec, unit(300)).unwrap();
    let base = gagliardo_sq(&f, 0.35).unwrap().value_sq;
    let shifted = gagliardo_sq(&f.map_values(|v| v + 7.0), 0.35).unwrap().value_sq;
    let mut rev = f.values().to_vec();
    rev.reverse();
    let reflected = gagliardo_sq(&SampledFunction::new(f.grid().clone(), rev).unwrap(), 0.35).unwrap().value_sq;
    assert!(rel(shifted, base) < 1e-12);
    assert!(rel(reflected, base) < 1e-12);
}

#[test]
fn scaling_law() {
    let gamma = 0.3;
    let spec = FunctionSpec::new(Family::Sine { amplitude: 1.0, frequency: 1.0, phase: 0.3 });
    let f = sample(&spec, unit(400)).unwrap();
    // f_2(x) = f(2x) on (0, 1/2)
    let half = SampledFunction::new(Grid1D::new(Interval::new(0.0, 0.5).unwrap(), 400).unwrap(), f.values().to_vec()).unwrap();
    let ratio = gagliardo_sq(&half, gamma).unwrap().value_sq / gagliardo_sq(&f, gamma).unwrap().value_sq;
    assert!(rel(ratio, 2f64.powf(2.0 * gamma - 1.0)) < 1e-2);
}

#[test]
fn direct_and_convolution_agree() {
    let spec = FunctionSpec::seeded(Family::RandomTrig { degree: 5, period: 2.0, decay: 1.0 }, 11);
    for region in [Region::Box, Region::unit_disk()] {
        let g = Grid2D::new(Interval::new(-1.0, 1.0).unwrap(), Interval::new(-1.0, 1.0).unwrap(), 40, 36, region).unwrap();
        let f = sample(&spec, g).unwrap();
        let a = gagliardo_sq_with(&f, 0.4, PairSumMethod::Direct).unwrap().value_sq;
        let b = gagliardo_sq_with(&f, 0.4, PairSumMethod::Convolution).unwrap().value_sq;
        assert!(rel(a, b) < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn worker_count_does_not_change_bits() {
    let spec = FunctionSpec::seeded(Family::RandomTrig { degree: 8, period: 1.0, decay: 1.0 }, 3);
    let f = sample(&spec, unit(1000)).unwrap();
    let g2 = Grid2D::new(Interval::unit(), Interval::unit(), 30, 30, Region::Box).unwrap();
    let f2 = sample(&FunctionSpec::seeded(Family::RandomTrig { degree: 4, period: 1.0, decay: 1.0 }, 3), g2).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (
                gagliardo_sq(&f, 0.45).unwrap().value_sq.to_bits(),
                gagliardo_sq_with(&f2, 0.45, PairSumMethod::Direct).unwrap().value_sq.to_bits(),
            )
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn fourier_oracle_1d() {
    let spec = FunctionSpec::new(Family::GaussianBump { center: vec![0.0], width: 0.3, amplitude: 1.0 });
    let f = sample(&spec, Grid1D::new(Interval::new(-16.0, 16.0).unwrap(), 4096).unwrap()).unwrap();
    for gamma in [0.25, 0.4, 0.5] {
        let pair = whole_space_gagliardo_sq(&f, gamma).unwrap().value_sq;
        let four = fourier_gagliardo_sq(&f, gamma).unwrap().value_sq;
        assert!(rel(pair, four) < 2e-2, "gamma {gamma}: {pair} vs {four}");
    }
}

#[test]
fn fourier_oracle_2d() {
    let spec = FunctionSpec::new(Family::GaussianBump { center: vec![0.0, 0.0], width: 0.3, amplitude: 1.0 });
    let g = Grid2D::new(Interval::new(-2.5, 2.5).unwrap(), Interval::new(-2.5, 2.5).unwrap(), 256, 256, Region::Box).unwrap();
    let f = sample(&spec, g).unwrap();
    let pair = whole_space_gagliardo_sq(&f, 0.4).unwrap().value_sq;
    let four = fourier_gagliardo_sq(&f, 0.4).unwrap().value_sq;
    assert!(rel(pair, four) < 2e-2, "{pair} vs {four}");
}

#[test]
fn box_exterior_weight_matches_ray_integral() {
    let gamma = 0.3;
    let q = 2.0 * gamma;
    let g = Grid2D::new(Interval::new(0.0, 2.0).unwrap(), Interval::new(0.0, 1.0).unwrap(), 8, 4, Region::Box).unwrap();
    let w = pairsum::exterior_weights(&g.clone().into(), gamma).unwrap();
    let m = 200_000;
    for (k, p) in g.active_points().into_iter().enumerate() {
        let brute: f64 = (0..m)
            .map(|i| {
                let th = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                let (c, s) = (th.cos(), th.sin());
                let tx = if c > 0.0 { (2.0 - p[0]) / c } else if c < 0.0 { -p[0] / c } else { f64::INFINITY };
                let ty = if s > 0.0 { (1.0 - p[1]) / s } else if s < 0.0 { -p[1] / s } else { f64::INFINITY };
                tx.min(ty).powf(-q) / q
            })
            .sum::<f64>()
            * 2.0
            * PI
            / m as f64;
        assert!(rel(w[k], brute) < 1e-6, "{} vs {brute}", w[k]);
    }
}

#[test]
fn sobolev_norm_cases() {
    let f = sample(&linear(), unit(2048)).unwrap();
    let s125 = sobolev_norm(&f, SmoothnessIndex::new(1.25).unwrap()).unwrap();
    assert!((s125.value - (4.0f64 / 3.0).sqrt()).abs() < 1e-6);
    let s0 = sobolev_norm(&f, SmoothnessIndex::new(0.0).unwrap()).unwrap();
    assert!((s0.value - (1.0f64 / 3.0).sqrt()).abs() < 1e-6);
    let zero = sample(&FunctionSpec::new(Family::Constant { value: 0.0 }), unit(64)).unwrap();
    for s in [0.0, 0.5, 1.0, 1.7] {
        assert_eq!(sobolev_norm(&zero, SmoothnessIndex::new(s).unwrap()).unwrap().value, 0.0);
    }
    assert!(matches!(SmoothnessIndex::new(2.0), Err(Error::Unsupported(_))));
    let no_grad = f.clone().without_gradient();
    assert!(matches!(sobolev_norm(&no_grad, SmoothnessIndex::new(1.5).unwrap()), Err(Error::Input(_))));
    assert!(sobolev_norm(&no_grad, SmoothnessIndex::new(0.5).unwrap()).is_ok());
}

#[test]
fn result_json_shape() {
    let f = sample(&linear(), unit(64)).unwrap();
    let r = gagliardo_sq(&f, 0.25).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["value_sq", "value", "gamma_or_s", "n", "method", "rate"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["method"], "pair-sum");
    assert!(rel(r.value * r.value, r.value_sq) < 1e-12);
    assert_eq!(r.csv_row().split(',').count(), SeminormResult::CSV_HEADER.split(',').count());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn absolute_value_contracts(values in prop::collection::vec(-5.0f64..5.0, 2..120), gamma in 0.01f64..0.99) {
        let g = unit(values.len());
        let f = SampledFunction::new(g, values).unwrap();
        let a = gagliardo_sq(&f, gamma).unwrap().value_sq;
        let b = gagliardo_sq(&f.map_values(f64::abs), gamma).unwrap().value_sq;
        prop_assert!(b <= a);
    }

    #[test]
    fn absolute_value_contracts_2d(values in prop::collection::vec(-5.0f64..5.0, 36), gamma in 0.01f64..0.99) {
        let g = Grid2D::new(Interval::unit(), Interval::unit(), 6, 6, Region::Box).unwrap();
        let f = SampledFunction::new(g, values).unwrap();
        let a = gagliardo_sq_with(&f, gamma, PairSumMethod::Direct).unwrap().value_sq;
        let b = gagliardo_sq_with(&f.map_values(f64::abs), gamma, PairSumMethod::Direct).unwrap().value_sq;
        prop_assert!(b <= a);
    }

    #[test]
    fn seminorm_is_nonnegative_and_homogeneous(values in prop::collection::vec(-3.0f64..3.0, 2..60), lambda in -4.0f64..4.0) {
        let f = SampledFunction::new(unit(values.len()), values).unwrap();
        let a = gagliardo_sq(&f, 0.5).unwrap().value_sq;
        let b = gagliardo_sq(&f.scaled(lambda), 0.5).unwrap().value_sq;
        prop_assert!(a >= 0.0);
        prop_assert!((b - lambda * lambda * a).abs() <= 1e-10 * (1.0 + b.abs()));
    }
}
