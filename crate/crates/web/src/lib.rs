//! Three views for the browser page: the `Z_{m,n}` field on a square, the
//! convergence of the kernel sum against its closed form, and coherent-state
//! weights at a chosen point.

use laguerre2d::analysis::{cs_vector, e_sum_bruteforce, e_sum_closed, KernelTruncation};
use laguerre2d::hypergeom::SeriesControl;
use laguerre2d::{z_eval, ZIndex};
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

const MAX_GRID: usize = 512;
const MAX_TRUNCATION: usize = 400;

/// `[|Z|, arg Z]` pairs on a `size × size` grid over `[-extent, extent]²`,
/// row-major with the first row at the top (largest imaginary part).
pub fn field(m: usize, n: usize, beta: f64, extent: f64, size: usize) -> Result<Vec<f64>, String> {
    let idx = ZIndex::new(m, n, beta).map_err(|e| e.to_string())?;
    if size == 0 || size > MAX_GRID {
        return Err(format!("grid size must be in 1..={MAX_GRID}"));
    }
    if !(extent > 0.0 && extent.is_finite()) {
        return Err("extent must be positive".into());
    }
    let step = if size > 1 {
        2.0 * extent / (size - 1) as f64
    } else {
        0.0
    };
    let mut out = Vec::with_capacity(2 * size * size);
    for row in 0..size {
        let im = extent - row as f64 * step;
        for col in 0..size {
            let re = -extent + col as f64 * step;
            let v = z_eval(idx, Complex64::new(re, im));
            out.push(v.norm());
            out.push(v.arg());
        }
    }
    Ok(out)
}

/// Partial sums of `Σ_{m=n}^{M} |Z_{m,n}(z)|² n!/Γ(β+m+1)` for `M = n..=m_max`,
/// followed by the closed-form value as the last element.
pub fn sum_convergence(n: usize, beta: f64, re: f64, im: f64, m_max: usize) -> Result<Vec<f64>, String> {
    ZIndex::new(n, n, beta).map_err(|e| e.to_string())?;
    if m_max < n || m_max > MAX_TRUNCATION {
        return Err(format!("truncation must be in {n}..={MAX_TRUNCATION}"));
    }
    let z = Complex64::new(re, im);
    let mut out: Vec<f64> = (n..=m_max).map(|m| e_sum_bruteforce(n, beta, z, m)).collect();
    let closed = e_sum_closed(n, beta, z.norm_sqr(), SeriesControl::default()).map_err(|e| e.to_string())?;
    out.push(closed.value);
    Ok(out)
}

/// `|c_m|²` of the coherent state at `z`, `m = n..=m_max`.
pub fn cs_weights(n: usize, beta: f64, re: f64, im: f64, m_max: usize) -> Result<Vec<f64>, String> {
    if m_max > MAX_TRUNCATION {
        return Err(format!("truncation must be at most {MAX_TRUNCATION}"));
    }
    let trunc = KernelTruncation::new(n, beta, m_max).map_err(|e| e.to_string())?;
    let c = cs_vector(&trunc, Complex64::new(re, im)).map_err(|e| e.to_string())?;
    Ok(c.iter().map(|v| v.norm_sqr()).collect())
}

#[wasm_bindgen(js_name = field)]
pub fn field_js(m: usize, n: usize, beta: f64, extent: f64, size: usize) -> Result<Vec<f64>, JsError> {
    field(m, n, beta, extent, size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sumConvergence)]
pub fn sum_convergence_js(n: usize, beta: f64, re: f64, im: f64, m_max: usize) -> Result<Vec<f64>, JsError> {
    sum_convergence(n, beta, re, im, m_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = csWeights)]
pub fn cs_weights_js(n: usize, beta: f64, re: f64, im: f64, m_max: usize) -> Result<Vec<f64>, JsError> {
    cs_weights(n, beta, re, im, m_max).map_err(|e| JsError::new(&e))
}
