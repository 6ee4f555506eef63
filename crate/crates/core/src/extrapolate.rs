//! Richardson extrapolation of `lim_{h -> 0+} g(h)` for `g` smooth and even in `h`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const LADDER_START: i32 = 4;
pub const LADDER_END: i32 = 12;
/// Number of Richardson columns (`h^2`, `h^4`, ... eliminated).
pub const RICHARDSON_TERMS: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    /// Samples `g(2^-j)` along the ladder.
    pub samples: Vec<f64>,
    /// Diagonal estimates after each new sample.
    pub estimates: Vec<f64>,
}

/// Extrapolates along `h = 2^-j`, `j = 4..=12`.
pub fn richardson_limit(g: impl Fn(f64) -> f64) -> Result<Extrapolation> {
    richardson_ladder(g, LADDER_START, LADDER_END, RICHARDSON_TERMS)
}

pub fn richardson_ladder(g: impl Fn(f64) -> f64, j0: i32, j1: i32, terms: usize) -> Result<Extrapolation> {
    assert!(j1 > j0 && terms >= 1);
    let samples: Vec<f64> = (j0..=j1).map(|j| g(2f64.powi(-j))).collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::ExtrapolationDiverged("non-finite sample on the ladder".into()));
    }
    // table[i] holds the current row; halving h scales h^2 by 1/4
    let mut prev: Vec<f64> = Vec::new();
    let mut estimates = Vec::with_capacity(samples.len());
    for &s in &samples {
        let mut row = vec![s];
        for c in 1..terms.min(prev.len() + 1) {
            let f = 4f64.powi(c as i32);
            let v = row[c - 1] + (row[c - 1] - prev[c - 1]) / (f - 1.0);
            row.push(v);
        }
        estimates.push(*row.last().unwrap());
        prev = row;
    }
    let scale = samples.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let noise = 1e4 * f64::EPSILON * scale;
    let d: Vec<f64> = estimates.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let last = d[d.len() - 1];
    let before = d[d.len() - 2];
    if last > noise && last > before {
        return Err(Error::ExtrapolationDiverged(format!(
            "successive estimates grew from {before:e} to {last:e}"
        )));
    }
    Ok(Extrapolation {
        value: *estimates.last().unwrap(),
        samples,
        estimates,
    })
}
