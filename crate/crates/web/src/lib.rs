//! wasm-bindgen exports for the static page in `www/`. Each export returns
//! a JSON string; see [`demo`] for the shapes.

pub mod demo;

use wasm_bindgen::prelude::*;

fn to_js(r: pinnlab_core::Result<serde_json::Value>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

/// Trains a time-discrete network (`scheme` is `ee` or `ie`) and returns
/// its profiles per level next to the reference solution.
#[wasm_bindgen]
pub fn train(
    problem: &str,
    scheme: &str,
    time_step: f64,
    n_points: usize,
    horizon: f64,
    iterations: usize,
    seed: u32,
) -> Result<String, JsError> {
    let req = demo::TrainRequest {
        problem: problem.into(),
        scheme: scheme.into(),
        time_step,
        n_points,
        horizon,
        iterations,
        seed: seed.into(),
    };
    to_js(demo::train_profiles(&req))
}

/// Reference profiles of a bundled heat problem.
#[wasm_bindgen]
pub fn reference(problem: &str, horizon: f64, levels: usize) -> Result<String, JsError> {
    to_js(demo::reference(problem, horizon, levels))
}

/// Discrete maximal-regularity identity on random data.
#[wasm_bindgen]
pub fn max_reg(m: usize, steps: usize, horizon: f64, seed: u32) -> Result<String, JsError> {
    to_js(demo::max_reg(m, steps, horizon, seed.into()))
}
