//! Browser bindings. Every entry point takes and returns JSON text so the
//! page needs no generated type glue; the `*_json` functions are the same
//! operations callable natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use spiral3::classify::{classify, ClassifyInput, PROFILE_TOL};
use spiral3::constructions::{
    check_developable, check_developable_numeric, default_tol_k, ruled_surface,
};
use spiral3::frenet::{integrate_frenet, FrenetState, SampledCurve};
use spiral3::io::{parse_profile_spec, report_value};
use spiral3::job::{classify_csv, parse_coeffs};
use spiral3::profiles::ProfilePair;

const MAX_SAMPLES: usize = 20_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn curve(pp: &ProfilePair, samples: usize) -> Result<SampledCurve, String> {
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples must be between 2 and {MAX_SAMPLES}"));
    }
    let step = pp.span() / (samples - 1) as f64;
    integrate_frenet(pp, step, &FrenetState::canonical(pp.s_min())).map_err(err)
}

fn points(c: &SampledCurve) -> Vec<[f64; 3]> {
    c.positions().iter().map(|p| [p.x, p.y, p.z]).collect()
}

/// Integrates the profile pair in `profile` (same JSON as the CLI) and
/// classifies it exactly.
pub fn synthesize_json(profile: &str, samples: usize) -> Result<String, String> {
    let pp = parse_profile_spec(profile).map_err(err)?;
    let c = curve(&pp, samples)?;
    let kappa: Vec<f64> = c.s().iter().map(|&s| pp.kappa_at(s)).collect::<Result<_, _>>().map_err(err)?;
    let tau: Vec<f64> = c.s().iter().map(|&s| pp.tau_at(s)).collect::<Result<_, _>>().map_err(err)?;
    let report = classify(ClassifyInput::Profile(&pp), PROFILE_TOL).map_err(err)?;
    Ok(json!({
        "s": c.s(),
        "points": points(&c),
        "kappa": kappa,
        "tau": tau,
        "report": report_value(&report),
    })
    .to_string())
}

/// Classifies pasted curve or intrinsics CSV text.
pub fn classify_json(csv: &str) -> Result<String, String> {
    let report = classify_csv(csv, None).map_err(err)?;
    Ok(report_value(&report).to_string())
}

/// Ruled surface along the integrated curve with director coefficients
/// `a,b,c,d`, plus symbolic and numeric developability.
pub fn surface_json(
    profile: &str,
    coeffs: &str,
    v_min: f64,
    v_max: f64,
    n_s: usize,
    n_v: usize,
) -> Result<String, String> {
    let pp = parse_profile_spec(profile).map_err(err)?;
    let dir = parse_coeffs(coeffs)?.director;
    if v_min > v_max {
        return Err(format!("empty ruling range [{v_min}, {v_max}]"));
    }
    let c = curve(&pp, n_s)?;
    let patch = ruled_surface(&c, dir, v_min, v_max, n_v).map_err(err)?;
    let symbolic = check_developable(&pp, dir, 1e-9).map_err(err)?;
    let numeric: Value = match check_developable_numeric(&patch, default_tol_k(&patch)) {
        Ok(r) => json!({"passed": r.passed, "max_abs_k": r.max_violation, "tol": r.tol}),
        Err(e) => json!({"error": e.to_string()}),
    };
    let vertices: Vec<[f64; 3]> = patch.grid.iter().map(|p| [p.x, p.y, p.z]).collect();
    Ok(json!({
        "n_s": patch.n_s,
        "n_v": patch.n_v,
        "vertices": vertices,
        "curve": points(&c),
        "symbolic": {"passed": symbolic.passed, "max_abs_det": symbolic.max_violation, "tol": symbolic.tol},
        "numeric": numeric,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn synthesize(profile: &str, samples: usize) -> Result<String, JsError> {
    synthesize_json(profile, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classifyCsv)]
pub fn classify_csv_text(csv: &str) -> Result<String, JsError> {
    classify_json(csv).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn surface(
    profile: &str,
    coeffs: &str,
    v_min: f64,
    v_max: f64,
    n_s: usize,
    n_v: usize,
) -> Result<String, JsError> {
    surface_json(profile, coeffs, v_min, v_max, n_s, n_v).map_err(|e| JsError::new(&e))
}
