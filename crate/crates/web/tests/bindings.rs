use hslab_web::{multiplier, nemytskii_ratio, seminorm_sq, MAX_CELLS};

const LINEAR: &str = r#"{"family":"linear","params":{"slope":1.0,"intercept":0.0}}"#;
const SINE: &str = r#"{"family":"sine","params":{"amplitude":1.0,"frequency":1.0,"phase":0.3}}"#;

#[test]
fn seminorm_of_the_identity() {
    // |x|^2 seminorm on (0, 1): 2 / ((2 - 2g)(3 - 2g))
    for (gamma, n) in [(0.25, 1024), (0.6, 1024)] {
        let exact = 2.0 / ((2.0 - 2.0 * gamma) * (3.0 - 2.0 * gamma));
        let got = seminorm_sq(LINEAR, 0.0, 1.0, gamma, n).unwrap();
        // dropped diagonal cells cost O(h^(2 - 2g))
        let tol = 3.0 * (1.0 / n as f64).powf(2.0 - 2.0 * gamma);
        assert!((got - exact).abs() < tol, "gamma {gamma}: {got} vs {exact}");
    }
}

#[test]
fn absolute_value_contracts_below_one() {
    let out: serde_json::Value = serde_json::from_str(&nemytskii_ratio(SINE, 0.0, 1.0, "T1", 0.5, 512).unwrap()).unwrap();
    let ratio = out["ratio"].as_f64().unwrap();
    assert!(ratio > 0.5 && ratio <= 1.0 + 1e-10, "{ratio}");
    assert_eq!(out["op"], "T1");
}

#[test]
fn multiplier_has_no_violations() {
    let out: serde_json::Value = serde_json::from_str(&multiplier(1.25, 64).unwrap()).unwrap();
    assert_eq!(out["violations"], 0);
    assert!(out["max_ratio"].as_f64().unwrap() <= out["constant"].as_f64().unwrap());
}

#[test]
fn bad_inputs_are_reported() {
    assert!(seminorm_sq("{", 0.0, 1.0, 0.3, 64).unwrap_err().contains("invalid function spec"));
    assert!(seminorm_sq(LINEAR, 1.0, 0.0, 0.3, 64).is_err());
    assert!(seminorm_sq(LINEAR, 0.0, 1.0, 1.2, 64).is_err());
    assert!(seminorm_sq(LINEAR, 0.0, 1.0, 0.3, MAX_CELLS + 1).is_err());
    assert!(nemytskii_ratio(SINE, 0.0, 1.0, "t9", 0.5, 64).is_err());
    assert!(multiplier(1.25, 4096).is_err());
}
