//! Browser bindings for the tipping-point laboratory.
//!
//! Every export takes and returns JSON text in the same formats the
//! `tipping-lab` CLI reads and writes. The plain `*_json` functions carry the
//! logic and are usable natively; the `#[wasm_bindgen]` wrappers only convert
//! errors into JavaScript exceptions.

use tipping_core::experiments::run_sweep;
use tipping_core::io;
use tipping_core::{
    generate, n_star_approx, n_star_exact, vectors_from_gram, GramMatrix, NetMode, Scenario,
    TokenClass, VocabEntry,
};
use wasm_bindgen::prelude::*;

const WORKED: &str = r#"{
  "version": 1,
  "dimension": 2,
  "tokens": [
    { "label": "G", "class": "good", "vector": [1.0, 0.0] },
    { "label": "B", "class": "bad", "vector": [1.2, -1.0] },
    { "label": "P", "class": "neutral", "vector": [0.5, 3.0] }
  ],
  "prompt": ["P", "G"],
  "good": "G",
  "bad": "B",
  "max_iterations": 40
}
"#;

fn scenario(text: &str) -> Result<Scenario, String> {
    io::parse_scenario(text.as_bytes()).map_err(|e| e.to_string())
}

pub fn worked_scenario_json() -> String {
    WORKED.to_string()
}

/// `net_mode` is `"sum"` or `"mean"`; it only affects `n_star_approx`.
pub fn predict_json(scenario_text: &str, net_mode: &str) -> Result<String, String> {
    let s = scenario(scenario_text)?;
    let mut p = n_star_exact(&s);
    p.n_star_approx = match net_mode {
        "sum" => p.n_star_approx,
        "mean" => n_star_approx(&s, NetMode::Mean),
        other => return Err(format!("unknown net mode `{other}`")),
    };
    Ok(io::prediction_to_json(&p))
}

pub fn simulate_json(scenario_text: &str) -> Result<String, String> {
    let trace = generate(&scenario(scenario_text)?).map_err(|e| e.to_string())?;
    Ok(io::emit_trace_json(&trace))
}

/// Runs a sweep spec; `scenario_text` is used when the spec has no scenario
/// of its own and may be empty otherwise.
pub fn sweep_json(spec_text: &str, scenario_text: &str) -> Result<String, String> {
    let fallback = if scenario_text.trim().is_empty() {
        None
    } else {
        Some(scenario(scenario_text)?)
    };
    let spec = io::parse_sweep_spec(spec_text.as_bytes(), fallback).map_err(|e| e.to_string())?;
    Ok(io::sweep_rows_to_json(&run_sweep(&spec, false)))
}

/// Builds the three-token scenario `G, B, P` with prompt `[P, G]` from its
/// six pairwise dot products.
#[allow(clippy::too_many_arguments)]
pub fn scenario_from_dots_json(
    gg: f64,
    bg: f64,
    bb: f64,
    pg: f64,
    pb: f64,
    pp: f64,
    max_iterations: usize,
) -> Result<String, String> {
    let gram = GramMatrix::new(vec![vec![gg, bg, pg], vec![bg, bb, pb], vec![pg, pb, pp]])
        .map_err(|e| e.to_string())?;
    let v = vectors_from_gram(&gram).map_err(|e| e.to_string())?;
    let vocab = vec![
        VocabEntry::new("G", v[0].clone(), TokenClass::Good),
        VocabEntry::new("B", v[1].clone(), TokenClass::Bad),
        VocabEntry::new("P", v[2].clone(), TokenClass::Neutral),
    ];
    let s = Scenario::new(vocab, vec![2, 0], max_iterations).map_err(|e| e.to_string())?;
    Ok(io::scenario_to_json(&s))
}

#[wasm_bindgen(js_name = workedScenario)]
pub fn worked_scenario() -> String {
    worked_scenario_json()
}

#[wasm_bindgen]
pub fn predict(scenario: &str, net_mode: &str) -> Result<String, JsError> {
    predict_json(scenario, net_mode).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(scenario: &str) -> Result<String, JsError> {
    simulate_json(scenario).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep(spec: &str, scenario: &str) -> Result<String, JsError> {
    sweep_json(spec, scenario).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = scenarioFromDots)]
#[allow(clippy::too_many_arguments)]
pub fn scenario_from_dots(
    gg: f64,
    bg: f64,
    bb: f64,
    pg: f64,
    pb: f64,
    pp: f64,
    max_iterations: usize,
) -> Result<String, JsError> {
    scenario_from_dots_json(gg, bg, bb, pg, pb, pp, max_iterations).map_err(|e| JsError::new(&e))
}
