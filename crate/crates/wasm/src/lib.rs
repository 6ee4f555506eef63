//! Browser bindings: a Bessel curve, a 1-D transform with its round trip, and
//! exact kernel bases. Each export wraps a plain function returning `Result<_, String>`.

use serde_json::json;
use wasm_bindgen::prelude::*;

use hankelc_core::hankel::{default_rules, hankel_nd, hankel_round_trip, GridSpec};
use hankelc_core::rational::{self, Rational};
use hankelc_core::special::bessel_j;
use hankelc_core::symbolic::{apply_l, check_hypothesis, kernel_basis, EvenPolynomial, OperatorPoly, SymbolicHFunction};
use hankelc_core::{MultiIndex, MuVector};

fn parse_list(s: &str) -> Result<Vec<Rational>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| rational::parse(t).map_err(|e| e.to_string()))
        .collect()
}

fn parse_mu(s: &str) -> Result<MuVector, String> {
    MuVector::new(parse_list(s)?).map_err(|e| e.to_string())
}

/// `Q(x^2)` written with `X_i = x_i^2`, e.g. `x1^2 - 1/3 x1^4 x2^2`.
pub fn format_poly(p: &EvenPolynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, q) in p.terms() {
        let neg = rational::sign(q) < 0;
        let mag = rational::format(&if neg { -q.clone() } else { q.clone() });
        out.push_str(match (out.is_empty(), neg) {
            (true, false) => "",
            (true, true) => "-",
            (false, false) => " + ",
            (false, true) => " - ",
        });
        let vars: Vec<String> = k
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| format!("x{}^{}", i + 1, 2 * e))
            .collect();
        if vars.is_empty() {
            out.push_str(&mag);
        } else if mag == "1" {
            out.push_str(&vars.join(" "));
        } else {
            out.push_str(&format!("{mag} {}", vars.join(" ")));
        }
    }
    out
}

/// `J_nu(z)` at `count` evenly spaced points of `[0, z_max]`.
pub fn bessel_values(nu: f64, z_max: f64, count: usize) -> Result<Vec<f64>, String> {
    if count < 2 || !(z_max > 0.0) {
        return Err("need count >= 2 and z_max > 0".into());
    }
    (0..count)
        .map(|i| bessel_j(nu, z_max * i as f64 / (count - 1) as f64).map_err(|e| e.to_string()))
        .collect()
}

/// `phi = x^(mu+1/2) Q(x^2) e^(-c x^2)` in one dimension: samples of `phi`,
/// `h_mu phi` and `h_mu h_mu phi` on `(0, y_max]`, as JSON.
pub fn transform_json(mu: &str, decay: &str, q: &str, y_max: f64, count: usize) -> Result<String, String> {
    let mu = parse_mu(mu)?;
    if mu.dim() != 1 {
        return Err("the demo transform is one-dimensional; give a single order".into());
    }
    let c = rational::parse(decay.trim()).map_err(|e| e.to_string())?;
    let coeffs = parse_list(q)?;
    let poly = EvenPolynomial::from_terms(
        1,
        coeffs.into_iter().enumerate().map(|(p, a)| (MultiIndex::from([p as u32]), a)),
    )
    .map_err(|e| e.to_string())?;
    let phi = SymbolicHFunction::new(mu.clone(), poly, c).map_err(|e| e.to_string())?;
    if !(y_max > 0.0) || count < 2 {
        return Err("need y_max > 0 and count >= 2".into());
    }
    let grid = GridSpec::uniform(1, y_max / count as f64, y_max, count).map_err(|e| e.to_string())?;
    let (first, second) = default_rules(&phi).map_err(|e| e.to_string())?;
    let f = phi.compile();
    let h = hankel_nd(&mu, |x| f.eval_unchecked(x), &grid, &first).map_err(|e| e.to_string())?;
    let back = hankel_round_trip(&phi, &grid, &first, &second).map_err(|e| e.to_string())?;
    let ys: Vec<f64> = grid.axes()[0].clone();
    let original: Vec<f64> = ys.iter().map(|&y| f.eval_unchecked(&[y])).collect();
    let err = original
        .iter()
        .zip(&back.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(json!({
        "y": ys,
        "phi": original,
        "transform": h.values,
        "round_trip": back.values,
        "round_trip_error": err,
    })
    .to_string())
}

/// Exact polynomial kernel of `L(P)`; `p` is the operator JSON `{"terms": [{"k": [..], "a": ".."}]}`.
pub fn kernel_json(p: &str, mu: &str, degree: u32) -> Result<String, String> {
    let p: OperatorPoly = serde_json::from_str(p).map_err(|e| e.to_string())?;
    let mu = parse_mu(mu)?;
    if p.dim() != mu.dim() {
        return Err(format!("P has {} variables but mu has {} orders", p.dim(), mu.dim()));
    }
    if degree > 8 {
        return Err("degree is capped at 8 in the demo".into());
    }
    let hyp = check_hypothesis(&p);
    if !hyp.pass {
        return Err(format!("hypothesis failed: {}", hyp.reason.unwrap_or_default()));
    }
    let basis = kernel_basis(&p, &mu, degree).map_err(|e| e.to_string())?;
    let mut elements = Vec::new();
    for f in &basis {
        let residual = apply_l(&p, &mu, f).map_err(|e| e.to_string())?;
        elements.push(json!({
            "Q": format_poly(&f.poly),
            "residual_terms": residual.poly.len(),
        }));
    }
    Ok(json!({"dimension": basis.len(), "basis": elements}).to_string())
}

#[wasm_bindgen]
pub fn bessel_curve(nu: f64, z_max: f64, count: usize) -> Result<Vec<f64>, JsError> {
    bessel_values(nu, z_max, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn transform_curve(mu: &str, decay: &str, q: &str, y_max: f64, count: usize) -> Result<String, JsError> {
    transform_json(mu, decay, q, y_max, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn liouville_kernel(p: &str, mu: &str, degree: u32) -> Result<String, JsError> {
    kernel_json(p, mu, degree).map_err(|e| JsError::new(&e))
}
