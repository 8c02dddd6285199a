//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Results are returned as flat `Float64Array`s so the page can plot them
//! without a serialization layer.

use scatterwalk::reduced::{asymptotic_params, spectral_decompose};
use scatterwalk::{
    asymptotic_amplitudes, coverage_distribution, optimal_steps, reduced_initial_state,
    reduced_operator, CoverageMode, StepMode,
};
use wasm_bindgen::prelude::*;

fn js_err(e: scatterwalk::WalkError) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Probabilities per step in the reduced model, five values per step:
/// `p_marked, p_w1, p_w2, p_w3, p_w4`.
#[wasm_bindgen]
pub fn localization_curve(n: usize, k: usize, phase: f64, steps: u32) -> Result<Vec<f64>, JsValue> {
    let op = reduced_operator(n, k, phase).map_err(js_err)?;
    let spectral = spectral_decompose(&op).map_err(js_err)?;
    let init = reduced_initial_state(n, k).map_err(js_err)?;
    let mut out = Vec::with_capacity(5 * (steps as usize + 1));
    for step in 0..=u64::from(steps) {
        let s = spectral.evolve(&init, step);
        out.push(s.marked_weight());
        out.extend(s.weights());
    }
    Ok(out)
}

/// Large-N estimate `sin^2(2xn)` of the marked probability per step.
#[wasm_bindgen]
pub fn asymptotic_curve(n: usize, k: usize, steps: u32) -> Vec<f64> {
    (0..=u64::from(steps))
        .map(|step| asymptotic_amplitudes(n, k, step).state.marked_weight())
        .collect()
}

/// `[formula, scan]` optimal step counts at phase pi/2.
#[wasm_bindgen]
pub fn optimal_steps_pair(n: usize, k: usize) -> Result<Vec<f64>, JsValue> {
    let formula = optimal_steps(n, k, StepMode::Formula).map_err(js_err)?;
    let scan = optimal_steps(n, k, StepMode::Scan { horizon: None }).map_err(js_err)?;
    Ok(vec![formula as f64, scan as f64])
}

/// `x = sqrt(K(K-1))/(N-1)`.
#[wasm_bindgen]
pub fn localization_rate(n: usize, k: usize) -> Result<f64, JsValue> {
    asymptotic_params(n, k).map(|p| p.x).map_err(js_err)
}

/// Probability of having discovered `j` marked vertices after `runs`
/// idealized searches, for `j = 0..=k`.
#[wasm_bindgen]
pub fn coverage(k: usize, runs: usize) -> Result<Vec<f64>, JsValue> {
    let dist = coverage_distribution(k, runs, &CoverageMode::exact()).map_err(js_err)?;
    Ok((0..=k).map(|j| dist.probability(j)).collect())
}
