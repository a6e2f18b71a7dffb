//! WebAssembly bindings for `www/index.html`. The numerics live in
//! [`compute`] so they can be tested natively.

use wasm_bindgen::prelude::*;

pub mod compute;

fn js(e: unitint::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn bloch3(bx: f64, by: f64, bz: f64, omega: f64, t_end: f64, steps: usize, z_max: f64) -> Result<Vec<f64>, JsError> {
    compute::bloch3(bx, by, bz, omega, t_end, steps, z_max).map_err(js)
}

#[wasm_bindgen]
pub fn spin_phases(bx: f64, by: f64, bz: f64, omega: f64, t_end: f64, steps: usize, z_max: f64) -> Result<Vec<f64>, JsError> {
    compute::spin_phases(bx, by, bz, omega, t_end, steps, z_max).map_err(js)
}

#[wasm_bindgen]
pub fn bloch5(c: f64, a: f64, t_end: f64, steps: usize, z_max: f64) -> Result<Vec<f64>, JsError> {
    compute::bloch5(c, a, t_end, steps, z_max).map_err(js)
}
