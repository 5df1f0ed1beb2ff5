//! Browser bindings. Each export wraps a plain function that native tests call
//! directly; functions are passed in as `FunctionSpec` JSON and sampled on an
//! interval `(a, b)`.

use hslab::domains::{sample, FunctionSpec, Grid1D, Interval, SampledFunction};
use hslab::experiments::anisotropic_multiplier_check;
use hslab::nemytskii::{apply, NemytskiiOp};
use hslab::norms::{gagliardo_sq, sobolev_norm, SmoothnessIndex};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request; the pair sum is quadratic in `n`.
pub const MAX_CELLS: usize = 4096;

fn sampled(spec_json: &str, a: f64, b: f64, n: usize) -> Result<SampledFunction, String> {
    if n > MAX_CELLS {
        return Err(format!("n = {n} exceeds the page limit of {MAX_CELLS} cells"));
    }
    let spec: FunctionSpec = serde_json::from_str(spec_json).map_err(|e| format!("invalid function spec: {e}"))?;
    let grid = Grid1D::new(Interval::new(a, b).map_err(|e| e.to_string())?, n).map_err(|e| e.to_string())?;
    let u = sample(&spec, grid).map_err(|e| e.to_string())?;
    Ok(if u.gradient().is_some() { u } else { u.with_fd_gradient() })
}

/// Squared Gagliardo seminorm of order `gamma`.
pub fn seminorm_sq(spec_json: &str, a: f64, b: f64, gamma: f64, n: usize) -> Result<f64, String> {
    let u = sampled(spec_json, a, b, n)?;
    Ok(gagliardo_sq(&u, gamma).map_err(|e| e.to_string())?.value_sq)
}

/// `{"norm_u", "norm_tu", "ratio"}` for `T u` in `H^s`.
pub fn nemytskii_ratio(spec_json: &str, a: f64, b: f64, op: &str, s: f64, n: usize) -> Result<String, String> {
    let op: NemytskiiOp = op.parse().map_err(|e| format!("{e}"))?;
    let u = sampled(spec_json, a, b, n)?;
    let index = SmoothnessIndex::new(s).map_err(|e| e.to_string())?;
    let norm_u = sobolev_norm(&u, index).map_err(|e| e.to_string())?.value;
    let norm_tu = sobolev_norm(&apply(op, &u), index).map_err(|e| e.to_string())?.value;
    let ratio = if norm_u > 0.0 { Some(norm_tu / norm_u) } else { None };
    Ok(serde_json::json!({ "op": op.to_string(), "s": s, "norm_u": norm_u, "norm_tu": norm_tu, "ratio": ratio }).to_string())
}

/// Multiplier bound over the integer frequency box of side `n`, as JSON.
pub fn multiplier(s: f64, n: usize) -> Result<String, String> {
    if n > 1024 {
        return Err(format!("frequency box {n} exceeds the page limit of 1024"));
    }
    let r = anisotropic_multiplier_check(s, n).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = seminormSq)]
pub fn seminorm_sq_js(spec_json: &str, a: f64, b: f64, gamma: f64, n: usize) -> Result<f64, JsError> {
    seminorm_sq(spec_json, a, b, gamma, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = nemytskiiRatio)]
pub fn nemytskii_ratio_js(spec_json: &str, a: f64, b: f64, op: &str, s: f64, n: usize) -> Result<String, JsError> {
    nemytskii_ratio(spec_json, a, b, op, s, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = multiplierCheck)]
pub fn multiplier_js(s: f64, n: usize) -> Result<String, JsError> {
    multiplier(s, n).map_err(|e| JsError::new(&e))
}
