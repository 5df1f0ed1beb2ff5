use super::*;
use crate::domains::{sample, Family, FunctionSpec, Grid1D, Interval};
use crate::error::Error;
use crate::hardy::Verdict;
use crate::nemytskii::NemytskiiOp;
use proptest::prelude::*;

fn unit() -> SweepDomain {
    SweepDomain::Interval { a: 0.0, b: 1.0 }
}

#[test]
fn t1_is_a_contraction_for_s_up_to_one() {
    let cfg = SweepConfig::new(NemytskiiOp::T1, vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![64, 128], 6, unit());
    let r = operator_norm_sweep(&cfg).unwrap();
    for v in &r.verdicts {
        assert_eq!(v.contraction, Some(true), "s = {}", v.s);
    }
    assert!(r.cells.iter().all(|c| c.max_ratio <= 1.0 + sweep::CONTRACTION_SLACK && c.max_ratio >= 0.0));
}

#[test]
fn sweep_config_validation() {
    let bad_s = SweepConfig::new(NemytskiiOp::T2, vec![1.5], vec![64], 1, unit());
    assert!(matches!(bad_s.validate(), Err(Error::Configuration(_))));
    let bad_n = SweepConfig::new(NemytskiiOp::T2, vec![0.5], vec![64, 128, 200], 1, unit());
    assert!(matches!(bad_n.validate(), Err(Error::Configuration(_))));
    let no_seeds = SweepConfig::new(NemytskiiOp::T2, vec![0.5], vec![64], 0, unit());
    assert!(no_seeds.validate().is_err());
    assert!(SweepConfig::new(NemytskiiOp::T2, vec![0.5], vec![64, 128, 256], 1, unit()).validate().is_ok());
}

#[test]
fn sweep_members_change_sign() {
    let cfg = SweepConfig::new(NemytskiiOp::T2, vec![0.5], vec![64], 8, unit());
    for seed in 0..8 {
        let u = cfg.member(seed, 128).unwrap();
        let v = u.values();
        assert!(v.iter().any(|x| *x < 0.0) && v.iter().any(|x| *x > 0.0));
        assert!(u.integral().abs() < 1e-12);
    }
}

#[test]
fn single_level_sweep_is_degenerate_pass() {
    let cfg = SweepConfig::new(NemytskiiOp::T2, vec![0.5], vec![128], 2, unit());
    let r = operator_norm_sweep(&cfg).unwrap();
    assert_eq!(r.verdicts[0].verdict, Verdict::PassDegenerate);
    assert!(r.passed);
}

#[test]
fn drift_violation_is_reported_as_failing_cell() {
    let mut cfg = SweepConfig::new(NemytskiiOp::T2, vec![1.25], vec![32, 64], 2, unit());
    cfg.drift_tol = 1e-12;
    let r = operator_norm_sweep(&cfg).unwrap();
    assert!(!r.passed);
    assert_eq!(r.failing_cells(), vec![(1.25, 64)]);
    let mut study = StudyReport { sweeps: vec![r], ..Default::default() };
    study.derive_claims();
    assert!(!study.passed());
    assert!(study.summary().contains("(s = 1.25, n = 64)"));
}

#[test]
fn sweep_is_deterministic_across_pools() {
    let cfg = SweepConfig::new(NemytskiiOp::T3, vec![0.75], vec![64, 128], 4, unit());
    let run = |k| {
        rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap().install(|| operator_norm_sweep(&cfg).unwrap())
    };
    assert_eq!(serde_json::to_string(&run(1)).unwrap(), serde_json::to_string(&run(4)).unwrap());
}

#[test]
fn classify_recognizes_both_signatures() {
    // Increments 0.9^k (1 + 2^-k): ratios approach 0.9 with a first-order correction.
    let conv: Vec<f64> = (0..8).scan(0.0, |acc, k| {
        let v = *acc;
        *acc += 0.9f64.powi(k) * (1.0 + 0.5f64.powi(k));
        Some(v)
    }).collect();
    let (v, _, rho) = classify(&conv);
    assert_eq!(v, Convergence::Converges);
    assert!((rho.unwrap() - 0.9).abs() < 0.01);
    let div: Vec<f64> = (1..7).map(|k| 0.3 * k as f64 - 0.5f64.powi(k)).collect();
    assert_eq!(classify(&div).0, Convergence::Diverges);
    assert_eq!(classify(&[1.0, 2.0, 3.0]).0, Convergence::Inconclusive);
    assert_eq!(classify(&[1.0, 2.0, 1.5, 3.0, 3.5]).0, Convergence::Inconclusive);
}

#[test]
fn sharpness_rejects_empty_configuration() {
    assert!(sharpness_study(&[], &[(64, 3)]).is_err());
    assert!(sharpness_study(&[1.25], &[]).is_err());
    assert!(matches!(sharpness_study(&[1.25], &[(64, 5)]), Err(Error::Resolution(_))));
    assert!(matches!(sharpness_study(&[1.25], &[(256, 4)]), Err(Error::Resolution(_))));
}

fn bump_pair(n: usize) -> crate::domains::SampledFunction {
    odd_bump_pair(n).unwrap().1
}

#[test]
fn gap_is_zero_for_nonnegative_input() {
    let g = Grid1D::new(Interval::new(-1.0, 1.0).unwrap(), 512).unwrap();
    let u = sample(
        &FunctionSpec::new(Family::CompactBump { center: vec![0.0], radius: 0.5, amplitude: 1.0 }),
        g,
    )
    .unwrap();
    assert_eq!(musina_nazarov_gap(&u, 1.25).unwrap(), 0.0);
}

#[test]
fn odd_bump_pair_has_positive_gap() {
    assert!(musina_nazarov_gap(&bump_pair(1024), 1.25).unwrap() > 0.0);
}

#[test]
fn musina_nazarov_preconditions() {
    let g = Grid1D::new(Interval::new(-1.0, 1.0).unwrap(), 256).unwrap();
    let pos = sample(&FunctionSpec::new(Family::CompactBump { center: vec![0.0], radius: 0.5, amplitude: 1.0 }), g.clone())
        .unwrap();
    let members = vec![("bump".to_string(), pos)];
    assert!(matches!(musina_nazarov_check(&members, &[1.25]), Err(Error::Precondition(_))));
    let sine = sample(&FunctionSpec::new(Family::Sine { amplitude: 1.0, frequency: 1.0, phase: 0.3 }), g).unwrap();
    assert!(matches!(musina_nazarov_check(&[("sine".into(), sine)], &[1.25]), Err(Error::Precondition(_))));
    let pair = vec![odd_bump_pair(256).unwrap()];
    assert!(matches!(musina_nazarov_check(&pair, &[1.0]), Err(Error::Parameter(_))));
    assert!(matches!(musina_nazarov_check(&pair, &[1.5]), Err(Error::Parameter(_))));
}

#[test]
fn sign_changing_family_members_pass() {
    let members = sign_changing_family(4, 512).unwrap();
    let reports = musina_nazarov_check(&members, &[1.1, 1.4]).unwrap();
    assert_eq!(reports.len(), 8);
    assert!(reports.iter().all(|r| r.verdict == Verdict::Pass));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gap_is_even_and_quadratic(lambda in 0.1f64..10.0, s in 1.05f64..1.45) {
        let u = bump_pair(256);
        let gap = musina_nazarov_gap(&u, s).unwrap();
        let neg = musina_nazarov_gap(&u.scaled(-1.0), s).unwrap();
        let scaled = musina_nazarov_gap(&u.scaled(lambda), s).unwrap();
        prop_assert!((gap - neg).abs() <= 1e-12 * gap.abs());
        prop_assert!((scaled - lambda * lambda * gap).abs() <= 1e-10 * scaled.abs());
    }

    #[test]
    fn multiplier_has_no_violations(s in 1.01f64..1.49, n in 1usize..48) {
        let m = anisotropic_multiplier_check(s, n).unwrap();
        prop_assert_eq!(m.violations, 0);
        prop_assert!(m.max_ratio <= m.constant);
    }
}

#[test]
fn multiplier_at_origin() {
    let m = anisotropic_multiplier_check(1.25, 1).unwrap();
    assert_eq!(m.argmax, [0, 0]);
    assert_eq!(m.max_ratio, 0.5);
    assert_eq!(m.constant, 2f64.powf(1.25));
}

#[test]
fn multiplier_max_sits_near_diagonal() {
    let m = anisotropic_multiplier_check(1.25, 128).unwrap();
    assert_eq!(m.violations, 0);
    let [a, b] = m.argmax;
    assert_eq!(a.abs(), b.abs());
    assert!(m.max_ratio < 2f64.powf(0.25));
    assert!(anisotropic_multiplier_check(1.5, 8).is_err());
}

#[test]
fn empty_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = StudyReport::default();
    r.derive_claims();
    assert!(r.passed());
    let files = emit_report(&r, dir.path()).unwrap();
    assert_eq!(files.len(), 3);
    let back = load_report(&dir.path().join("report.json")).unwrap();
    assert_eq!(back, r);
    assert!(compare_golden(&r, &back, &Tolerances::default()).unwrap().is_empty());
}

#[test]
fn golden_comparison_respects_field_tolerances() {
    let cfg = SweepConfig::new(NemytskiiOp::T2, vec![0.5], vec![64, 128], 2, unit());
    let mut r = StudyReport { sweeps: vec![operator_norm_sweep(&cfg).unwrap()], ..Default::default() };
    r.derive_claims();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&r, dir.path()).unwrap();
    let golden = load_report(&dir.path().join("report.json")).unwrap();
    assert!(compare_golden(&r, &golden, &Tolerances::default()).unwrap().is_empty());

    let mut perturbed = golden.clone();
    perturbed.sweeps[0].cells[0].max_ratio *= 1.0 + 1e-6;
    let diffs = compare_golden(&r, &perturbed, &Tolerances::default()).unwrap();
    assert_eq!(diffs.len(), 1);
    assert!(diffs[0].contains("max_ratio"));
    let mut loose = Tolerances::default();
    loose.fields.insert("max_ratio".into(), 1e-4);
    assert!(compare_golden(&r, &perturbed, &loose).unwrap().is_empty());
}

#[test]
fn emit_report_names_the_failing_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let err = emit_report(&StudyReport::default(), &blocker.join("sub")).unwrap_err();
    assert!(err.to_string().contains("file"));
}

#[test]
fn settled_ratios_converge_without_extrapolation() {
    let values: Vec<f64> = (0..5).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    let (v, limit, rho) = classify(&values);
    assert_eq!(v, Convergence::Converges);
    assert_eq!(rho, Some(0.5));
    assert!((limit.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sharpness_verdicts_agree_across_schedules() {
    let rows = sharpness_study(&sharpness::DEFAULT_S_LIST, &sharpness::DEFAULT_SCHEDULES).unwrap();
    assert_eq!(rows.len(), 16);
    for r in &rows {
        assert_eq!(r.verdict, sharpness::expected(r.s, r.input), "{} at s = {} from {}", r.input, r.s, r.base_n);
    }
    let kink = |s: f64| rows.iter().find(|r| r.s == s && r.input == SharpnessInput::AbsPhi).unwrap().rate.unwrap();
    // Increments of the kinked input shrink like 2^-(3 - 2s) per doubling.
    for s in [1.25, 1.4, 1.45] {
        assert!((kink(s) - 2f64.powf(2.0 * s - 3.0)).abs() < 0.01, "s = {s}: {}", kink(s));
    }
}

#[test]
fn study_config_runs_every_section() {
    let cfg: StudyConfig = serde_json::from_str(
        r#"{
            "sweeps": [{"operator": "T2", "s_list": [0.5], "n_list": [64, 128], "seeds": 2,
                        "domain": {"kind": "interval", "a": 0.0, "b": 1.0}}],
            "sharpness": {"s_list": [1.25], "schedules": [[128, 5]]},
            "musina_nazarov": {"s_list": [1.25], "count": 2, "n": 256},
            "multiplier": [{"s": 1.25, "n": 16}]
        }"#,
    )
    .unwrap();
    let r = run_study(&cfg).unwrap();
    assert_eq!(r.claims.len(), 4);
    assert!(r.passed(), "{}", r.summary());
    assert!(run_study(&StudyConfig::default()).unwrap().claims.is_empty());
    assert!(serde_json::from_str::<StudyConfig>(r#"{"sweep": []}"#).is_err());
}
