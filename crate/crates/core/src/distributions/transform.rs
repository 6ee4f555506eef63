//! Both sides of `(h_mu T^k delta_mu, phi) = (T^k delta_mu, h_mu phi)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrapolate::richardson_limit;
use crate::hankel::{tensor_weights, GridSpec};
use crate::multiindex::MultiIndex;
use crate::quadrature::QuadratureRule;
use crate::rational;
use crate::special::{c_mu, reduced_bessel, MuVector};
use crate::symbolic::SymbolicHFunction;

use super::delta::hankel_delta;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransformPairing {
    /// `(T^k delta_mu, h_mu phi)` from the numerical transform near the origin.
    pub lhs: f64,
    /// `(C_k^mu t^(mu+2k+1/2), phi)` by quadrature.
    pub rhs: f64,
}

impl TransformPairing {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).abs() / scale
        }
    }
}

/// The left side needs `lim_{y -> 0} T^k_y [y^(-mu-1/2) h_mu phi(y)]`. Under the
/// integral, `T_y (z^-nu J_nu(z))|_{z = t y} = -t^2 (ty)^(-nu-1) J_(nu+1)(ty)`, so
///
/// `T^k_y [y^(-mu-1/2) h_mu phi](y) = (-1)^|k| int phi(t) t^(mu+1/2+2k) prod_i (t_i y_i)^-(mu_i+k_i) J_(mu_i+k_i)(t_i y_i) dt`
///
/// which is evaluated by quadrature on `y = 2^-j (1, ..., 1)` and extrapolated.
pub fn pair_delta_transform(
    k: &MultiIndex,
    mu: &MuVector,
    phi: &SymbolicHFunction,
    rule: &QuadratureRule,
) -> Result<TransformPairing> {
    mu.check_dim(k.dim())?;
    if phi.mu != *mu {
        return Err(Error::Domain("pairing order differs from the function's mu".into()));
    }
    if rational::to_f64(&phi.decay) <= 0.0 {
        return Err(Error::DecayRequired);
    }
    let n = phi.dim();
    let nodes = GridSpec::from_rule(n, rule)?;
    let weights = tensor_weights(n, rule);
    let target = hankel_delta(k, mu)?.compile();
    let f = phi.compile();
    // w * phi(t) * t^(mu+1/2+2k), shared by both sides up to C_k^mu
    let moment: Vec<f64> = crate::hankel::sample_grid(&nodes, |t| f.eval_unchecked(t) * target.eval_unchecked(t))
        .iter()
        .zip(&weights)
        .map(|(a, w)| a * w)
        .collect();
    let ck = rational::to_f64(&crate::special::c_k_mu_exact(mu, k)?);
    let rhs: f64 = moment.iter().sum();
    if ck == 0.0 {
        return Err(Error::Domain("C_k^mu vanished".into()));
    }
    let orders: Vec<f64> = (0..n).map(|i| mu.order_f64(i) + k.get(i) as f64).collect();
    let sign = if k.length() % 2 == 0 { 1.0 } else { -1.0 };
    let m = rule.len();
    let limit = richardson_limit(|h| {
        let factors: Vec<Vec<f64>> = orders
            .iter()
            .map(|&nu| {
                rule.nodes
                    .iter()
                    .map(|&t| reduced_bessel(nu, t * h).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        let mut sum = 0.0;
        for (idx, v) in moment.iter().enumerate() {
            let mut prod = *v;
            let mut r = idx;
            for i in (0..n).rev() {
                prod *= factors[i][r % m];
                r /= m;
            }
            sum += prod;
        }
        sign * sum / ck
    })?;
    Ok(TransformPairing {
        lhs: c_mu(mu)? * limit.value,
        rhs,
    })
}
