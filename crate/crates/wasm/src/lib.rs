//! Browser bindings: gap probabilities, the Tracy-Widom curve and random
//! RSK shapes. The plain functions are the tested surface; the exported
//! wrappers only convert errors.

use dope_core::fredholm::{plancherel_gap, tracy_widom};
use dope_core::rsk::rsk_shape_permutation;
use dope_core::sampler::{rng, sample_permutation};
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-10;
const MAX_GRID: usize = 2_000;
const MAX_PERMUTATION: usize = 200_000;

/// `P[λ_1 <= n]` under Poissonized Plancherel for `n = 0..=n_max`.
pub fn gap_table(alpha: f64, n_max: usize) -> Result<Vec<f64>, String> {
    if !(0.0..=1e4).contains(&alpha) {
        return Err(format!("alpha must lie in [0, 1e4], got {alpha}"));
    }
    if n_max > MAX_GRID {
        return Err(format!("at most {MAX_GRID} thresholds"));
    }
    (0..=n_max).map(|n| plancherel_gap(alpha, n, TOL).map(|r| r.value).map_err(|e| e.to_string())).collect()
}

/// `F(t)` on `count` equally spaced points of `[lo, hi]`.
pub fn tw_curve(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, String> {
    if !(lo < hi) || !(2..=MAX_GRID).contains(&count) {
        return Err("need lo < hi and 2 to 2000 points".into());
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| tracy_widom(lo + i as f64 * step, TOL).map(|r| r.value).map_err(|e| e.to_string())).collect()
}

/// Row lengths of the RSK shape of a uniform permutation of `n`.
pub fn random_shape(n: usize, seed: u64) -> Result<Vec<u32>, String> {
    if n > MAX_PERMUTATION {
        return Err(format!("n is capped at {MAX_PERMUTATION}"));
    }
    let p = sample_permutation(n, &mut rng(seed));
    let shape = rsk_shape_permutation(&p).map_err(|e| e.to_string())?;
    Ok(shape.parts().iter().map(|&x| x as u32).collect())
}

#[wasm_bindgen(js_name = gapTable)]
pub fn gap_table_js(alpha: f64, n_max: usize) -> Result<Vec<f64>, JsError> {
    gap_table(alpha, n_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = twCurve)]
pub fn tw_curve_js(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, JsError> {
    tw_curve(lo, hi, count).map_err(|e| JsError::new(&e))
}

/// The seed arrives as a JS number; integers up to 2^53 are exact.
#[wasm_bindgen(js_name = randomShape)]
pub fn random_shape_js(n: usize, seed: f64) -> Result<Vec<u32>, JsError> {
    random_shape(n, seed as u64).map_err(|e| JsError::new(&e))
}
