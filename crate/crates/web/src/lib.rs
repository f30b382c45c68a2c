//! Browser bindings: limiting spectral curves, Evans zero counts and the
//! Mathieu band gap. Results are returned as JSON text.

use floquet::applications::{build_mathieu, build_named, BuiltModel};
use floquet::degree::{locate_zeros, winding_number, Contour};
use floquet::dispersion::sample_branches;
use floquet::monodromy::{homotopy_evans, homotopy_evans_with_derivative};
use floquet::ode::Tolerances;
use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-10;
const MAX_CURVE_POINTS: usize = 4001;

/// `key=value` pairs separated by spaces, commas or semicolons.
fn parse_params(text: &str) -> Result<Vec<(String, f64)>, String> {
    text.split(|ch: char| ch.is_whitespace() || ch == ',' || ch == ';')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (k, v) = t.split_once('=').ok_or_else(|| format!("expected key=value, got '{t}'"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
            if !v.is_finite() {
                return Err(format!("'{k}' is not finite"));
            }
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn open(model: &str, params: &str) -> Result<BuiltModel, String> {
    let owned = parse_params(params)?;
    let pairs: Vec<(&str, f64)> = owned.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    build_named(model, &pairs).map_err(|e| e.to_string())
}

fn curves_json(built: &BuiltModel, lo: f64, hi: f64, count: usize) -> Result<Value, String> {
    if count > MAX_CURVE_POINTS {
        return Err(format!("at most {MAX_CURVE_POINTS} grid points"));
    }
    let branches = sample_branches(&built.model, lo, hi, count).map_err(|e| e.to_string())?;
    let list: Vec<Value> = branches
        .iter()
        .map(|b| {
            json!({
                "branch": b.branch_id,
                "mu": b.samples.iter().map(|s| s.0).collect::<Vec<_>>(),
                "re": b.samples.iter().map(|s| s.1.re).collect::<Vec<_>>(),
                "im": b.samples.iter().map(|s| s.1.im).collect::<Vec<_>>(),
                "gaps": b.gaps,
            })
        })
        .collect();
    Ok(json!({ "model": built.model.name, "branches": list }))
}

fn zeros_json(built: &BuiltModel, mu: f64, center: Complex64, radius: f64, s: f64) -> Result<Value, String> {
    let (model, eps) = (&built.model, built.eps);
    let tol = Tolerances::from_tol(TOL);
    let contour = Contour::circle(center, radius).map_err(|e| e.to_string())?;
    let count = winding_number(|z| homotopy_evans(model, s, z, mu, eps, tol), &contour).map_err(|e| e.to_string())?;
    let mut df = |z| homotopy_evans_with_derivative(model, s, z, mu, eps, tol).map(|p| p.1);
    let zeros = locate_zeros(|z| homotopy_evans(model, s, z, mu, eps, tol), Some(&mut df), &contour, 1e-8)
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "count": count.count,
        "period": model.period(eps).map_err(|e| e.to_string())?,
        "zeros": zeros.iter().map(|z| json!({"re": z.lambda.re, "im": z.lambda.im, "multiplicity": z.multiplicity})).collect::<Vec<_>>(),
    }))
}

/// Evans zeros of the Mathieu operator near the frozen eigenvalue `a0 - mu²`.
fn gap_json(a0: f64, eps: f64, mu: f64) -> Result<Value, String> {
    let built = build_mathieu(a0, eps).map_err(|e| e.to_string())?;
    let radius = (4.0 * eps).max(0.5);
    let center = Complex64::new(a0 - mu * mu, 0.0);
    let mut v = zeros_json(&built, mu, center, radius, 1.0)?;
    let re: Vec<f64> = v["zeros"].as_array().into_iter().flatten().filter_map(|z| z["re"].as_f64()).collect();
    let width = match re.as_slice() {
        [a, .., b] => Some(b - a),
        _ => None,
    };
    v["center"] = json!(center.re);
    v["radius"] = json!(radius);
    v["gap_width"] = json!(width);
    Ok(v)
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// A model chosen by name with `key=value` parameters.
#[wasm_bindgen]
pub struct Model {
    built: BuiltModel,
}

#[wasm_bindgen]
impl Model {
    #[wasm_bindgen(constructor)]
    pub fn new(name: &str, params: &str) -> Result<Model, JsError> {
        open(name, params).map(|built| Model { built }).map_err(|e| JsError::new(&e))
    }

    pub fn period(&self) -> Result<f64, JsError> {
        self.built.period().map_err(|e| JsError::new(&e.to_string()))
    }

    /// Limiting branches on `[lo, hi]` as `{branches: [{mu, re, im, gaps}]}`.
    pub fn curves(&self, lo: f64, hi: f64, count: usize) -> Result<String, JsError> {
        to_js(curves_json(&self.built, lo, hi, count))
    }

    /// Winding count and located zeros of the homotopy Evans function in a disk.
    pub fn zeros(&self, mu: f64, center_re: f64, center_im: f64, radius: f64, s: f64) -> Result<String, JsError> {
        to_js(zeros_json(&self.built, mu, Complex64::new(center_re, center_im), radius, s))
    }
}

#[wasm_bindgen]
pub fn mathieu_gap(a0: f64, eps: f64, mu: f64) -> Result<String, JsError> {
    to_js(gap_json(a0, eps, mu))
}
