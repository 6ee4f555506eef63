//! Taylor expansion of u-parts at the origin and its remainder.

use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::multiindex::{graded_enumerate, with_length, MultiIndex};
use crate::rational::{self, Rational};
use crate::special::{c_mu, MuVector};
use crate::symbolic::{apply_tk, EvenPolynomial, SymbolicHFunction, UForm};

use super::delta::{pair_delta, pair_delta_reduced, taylor_weight};

/// Ladder used for remainder samples, `x = 2^-j (1, ..., 1)`.
pub const REMAINDER_LADDER: std::ops::RangeInclusive<i32> = 1..=12;

#[derive(Clone, Debug, Serialize)]
pub struct TaylorCoefficient {
    pub k: MultiIndex,
    /// From the exact constant term.
    #[serde(serialize_with = "rational::serialize")]
    pub exact: Rational,
    /// From [`pair_delta`] (extrapolated when the input decays).
    pub numeric: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemainderSamples {
    /// `T^k` applied to the remainder (`k = 0` is the remainder itself).
    pub k: MultiIndex,
    pub j: Vec<i32>,
    pub values: Vec<f64>,
}

impl RemainderSamples {
    /// `|values|` non-increasing from ladder index `j_from` on, up to rounding
    /// of the O(1) terms whose difference forms the remainder.
    pub fn monotone_from(&self, j_from: i32) -> bool {
        let v: Vec<f64> = self
            .j
            .iter()
            .zip(&self.values)
            .filter(|(j, _)| **j >= j_from)
            .map(|(_, v)| v.abs())
            .collect();
        v.windows(2).all(|w| w[1] <= w[0] + 8.0 * f64::EPSILON)
    }

    pub fn last_abs(&self) -> f64 {
        self.values.last().map(|v| v.abs()).unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TaylorReport {
    pub order: u32,
    pub coefficients: Vec<TaylorCoefficient>,
    pub remainders: Vec<RemainderSamples>,
}

impl TaylorReport {
    /// The Taylor polynomial `sum a_{2k} x^(2k)` with exact coefficients.
    pub fn polynomial(&self, dim: usize) -> EvenPolynomial {
        let mut p = EvenPolynomial::zero(dim);
        for c in &self.coefficients {
            p.add_term(c.k.clone(), c.exact.clone());
        }
        p
    }
}

/// `a_{2k} = (T^k delta_mu, phi) / (C_mu 2^|k| k!)` for `|k| <= r`, with samples of
/// `R_{2r} = u - sum a_{2k} x^(2k)` and of `T^k R_{2r}`, `|k| = r`.
pub fn taylor_coeffs(mu: &MuVector, phi: &SymbolicHFunction, r: u32) -> Result<TaylorReport> {
    let n = phi.dim();
    let cm = c_mu(mu)?;
    let mut coefficients = Vec::new();
    for k in graded_enumerate(n, r) {
        let w = taylor_weight(&k);
        let exact = pair_delta_reduced(&k, mu, phi)? * &w;
        let numeric = pair_delta(&k, mu, phi)? / cm * rational::to_f64(&w);
        coefficients.push(TaylorCoefficient { k, exact, numeric });
    }
    let mut report = TaylorReport {
        order: r,
        coefficients,
        remainders: Vec::new(),
    };
    let taylor = UForm::polynomial(report.polynomial(n));
    let u = phi.u_part();
    let mut ks = vec![MultiIndex::zero(n)];
    if r > 0 {
        ks.extend(with_length(n, r));
    }
    for k in ks {
        // the two parts carry different Gaussian rates, so they are evaluated separately
        let a = apply_tk(&k, &u).compile();
        let b = apply_tk(&k, &taylor).compile();
        let j: Vec<i32> = REMAINDER_LADDER.collect();
        let values = j
            .iter()
            .map(|&j| {
                let x = vec![2f64.powi(-j); n];
                a.eval(&x) - b.eval(&x)
            })
            .collect();
        report.remainders.push(RemainderSamples { k, j, values });
    }
    Ok(report)
}

/// Whether the Taylor polynomial reproduces a decay-free `phi` exactly.
pub fn is_exact_polynomial(report: &TaylorReport, phi: &SymbolicHFunction) -> bool {
    phi.decay.is_zero() && phi.poly.sub(&report.polynomial(phi.dim())).terms().all(|(k, q)| k.length() > report.order || q.is_zero())
}
