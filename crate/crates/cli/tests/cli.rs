use std::path::Path;
use std::process::{Command, Output};

use hslab::experiments::{StudyReport, SweepReport};
use hslab::norms::SeminormResult;

fn hslab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hslab"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("HSLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn seminorm_of_linear_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = hslab(dir.path(), &["seminorm", "--fn", "linear", "--domain", "0,1", "--gamma", "0.25", "--n", "1024"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    let value: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((value - 8.0 / 15.0).abs() < 1e-3, "{line}");
    // 12 significant digits on the console
    assert_eq!(line.split_whitespace().nth(1).unwrap().len(), "0.533320487538".len());
    let r: SeminormResult = serde_json::from_str(&std::fs::read_to_string(dir.path().join("seminorm.json")).unwrap()).unwrap();
    assert!((r.value_sq - value).abs() < 1e-11);
}

#[test]
fn out_of_range_gamma_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = hslab(dir.path(), &["seminorm", "--gamma", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(0, 1)"), "{}", stderr(&o));
    assert!(!dir.path().join("seminorm.json").exists());
}

#[test]
fn unknown_flags_and_bad_threads_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hslab(dir.path(), &["seminorm", "--gamma", "0.3", "--bogus"]).status.code(), Some(2));
    assert_eq!(hslab(dir.path(), &["--threads", "0", "report"]).status.code(), Some(2));
    assert_eq!(hslab(dir.path(), &["nosuch"]).status.code(), Some(2));
    assert_eq!(hslab(dir.path(), &["seminorm", "--fn", "nosuch", "--gamma", "0.3"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_reports_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hslab(dir.path(), &["--format", "both", "sweep", "--op", "T2", "--s", "1.25", "--n", "256,512,1024", "--seeds", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let r: SweepReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert!(r.passed && r.cells.len() == 3);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with(SweepReport::CSV_HEADER));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn drift_violation_exits_one_and_names_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    let o = hslab(dir.path(), &["sweep", "--s", "1.25", "--n", "32,64", "--seeds", "2", "--drift-tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failing cell s 1.25 n 64"), "{}", stdout(&o));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = hslab(dir.path(), &["--threads", threads, "sweep", "--op", "t3", "--s", "0.5,1.25", "--n", "128,256", "--seeds", "4"]);
        assert_eq!(o.status.code(), Some(0));
        (stdout(&o), std::fs::read(dir.path().join("sweep.json")).unwrap())
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn empty_report_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = hslab(dir.path(), &["report"]);
    assert_eq!(o.status.code(), Some(0));
    let r: StudyReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r, StudyReport::default());
    assert!(dir.path().join("summary.txt").exists() && dir.path().join("report.csv").exists());
}

#[test]
fn report_matches_its_own_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.json");
    std::fs::write(
        &config,
        r#"{"sweeps": [{"operator": "t2", "s_list": [0.5, 1.25], "n_list": [64, 128], "seeds": 3,
                        "domain": {"kind": "interval", "a": 0.0, "b": 1.0}}],
            "multiplier": [{"s": 1.25, "n": 32}]}"#,
    )
    .unwrap();
    let first = dir.path().join("first");
    let o = hslab(&first, &["report", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let golden = first.join("report.json");
    let o = hslab(&dir.path().join("second"), &["report", "--config", config.to_str().unwrap(), "--golden", golden.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("golden diffs 0"));
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hslab"))
        .args(["--format", "csv", "seminorm", "--fn", "sine", "--gamma", "0.4", "--n", "128"])
        .env("HSLAB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("seminorm.csv").exists());
    assert!(!dir.path().join("seminorm.json").exists());
}

#[test]
fn nemytskii_accepts_negative_domains() {
    let dir = tempfile::tempdir().unwrap();
    let o = hslab(dir.path(), &["nemytskii", "--fn", "sine", "--domain", "-1,1", "--s", "0.75", "--n", "256"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("nemytskii.json")).unwrap()).unwrap();
    assert!(json["ratio"].as_f64().unwrap() <= 1.0);
    assert!(json["decomposition"].as_array().is_some_and(|d| !d.is_empty()));
}

#[test]
fn hardy_extend_and_spectral_subcommands_run() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["hardy", "kernel"][..],
        &["hardy", "scaling", "--alpha", "0.5"],
        &["hardy", "halfline"],
        &["hardy", "interval", "--fn", "sine"],
        &["extend", "--model", "zero", "--fn", "bump", "--n", "128"],
        &["extend", "--model", "reflect", "--n", "32"],
        &["extend", "--model", "disk", "--n", "32"],
        &["mn-check", "--count", "3", "--n", "512", "--box", "32"],
    ] {
        let o = hslab(dir.path(), args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}{}", stdout(&o), stderr(&o));
    }
    for stem in ["hardy-kernel", "hardy-scaling", "hardy-halfline", "hardy-interval", "extend", "mn-check"] {
        let text = std::fs::read_to_string(dir.path().join(format!("{stem}.json"))).unwrap();
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }
    let mn: StudyReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("mn-check.json")).unwrap()).unwrap();
    assert_eq!(mn.musina_nazarov.len(), 9);
}

#[test]
fn sharpness_rejects_coarse_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let o = hslab(dir.path(), &["sharpness", "--schedule", "64x5"]);
    assert_eq!(o.status.code(), Some(2));
}
