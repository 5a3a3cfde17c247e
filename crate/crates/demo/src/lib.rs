//! Browser bindings for three small operations: the Γ^s density curve, the
//! norm-ratio profile over `s`, and a single sign certificate.
//!
//! Each binding is a thin wrapper over a plain function so the logic can be
//! tested off the browser.

use heavytail::certify::certify_q;
use heavytail::densities::gamma_s_density;
use heavytail::extremal::{norm_ratio_scan, ScanOptions};
use heavytail::Result;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Interleaved `x, pdf(x)` pairs of Γ^s over a window covering all but a
/// negligible part of the mass.
pub fn density_curve(s: f64, samples: usize) -> Result<Vec<f64>> {
    let d = gamma_s_density(s)?;
    let samples = samples.clamp(2, 10_000);
    let c = d.breakpoint();
    let lo = if d.has_left_piece() { c - 8.0 * (1.0 - s) } else { c };
    let hi = if d.has_right_piece() { c + 8.0 * s } else { c };
    let mut out = Vec::with_capacity(2 * samples);
    for i in 0..samples {
        let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        out.push(x);
        out.push(d.pdf(x));
    }
    Ok(out)
}

/// `‖Γ^s‖_q/‖Γ^s‖_p` on a uniform `s`-grid, as JSON.
pub fn ratio_profile(p: f64, q: f64, grid: usize) -> Result<String> {
    let opts = ScanOptions {
        grid: grid.clamp(2, 2001),
        refine: false,
        jobs: 1,
        ..ScanOptions::default()
    };
    let r = norm_ratio_scan(p, q, &opts)?;
    let s: Vec<f64> = r.points.iter().map(|pt| pt.param).collect();
    let value: Vec<f64> = r.points.iter().map(|pt| pt.value).collect();
    Ok(json!({
        "p": p,
        "q": q,
        "s": s,
        "value": value,
        "best_s": r.grid_best.param,
        "best_value": r.grid_best.value,
        "checks": r.checks,
    })
    .to_string())
}

/// The certificate record for one even `q`, rationals as `"num/den"`.
pub fn certificate(q: usize) -> Result<String> {
    let cert = certify_q(q)?;
    Ok(serde_json::to_string(&cert.to_record()).expect("records serialize"))
}

fn js(e: heavytail::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = densityCurve)]
pub fn density_curve_js(s: f64, samples: usize) -> std::result::Result<Vec<f64>, JsError> {
    density_curve(s, samples).map_err(js)
}

#[wasm_bindgen(js_name = ratioProfile)]
pub fn ratio_profile_js(p: f64, q: f64, grid: usize) -> std::result::Result<String, JsError> {
    ratio_profile(p, q, grid).map_err(js)
}

#[wasm_bindgen(js_name = certificate)]
pub fn certificate_js(q: usize) -> std::result::Result<String, JsError> {
    certificate(q).map_err(js)
}
