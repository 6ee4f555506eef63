//! Polynomial solutions of `L f = 0` and their weak spectral certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel::{hankel_nd, tensor_weights, GridSpec};
use crate::multiindex::graded_enumerate;
use crate::quadrature::QuadratureRule;
use crate::rational::{self, Rational};
use crate::special::MuVector;
use crate::symbolic::{
    apply_l, check_hypothesis, kernel_basis, HypothesisReport, OperatorPoly, SymbolicHFunction,
};

/// Decay rates cycled through by [`default_family`].
pub const FAMILY_DECAYS: [(i64, i64); 3] = [(1, 4), (1, 2), (1, 1)];
pub const FAMILY_SIZE: usize = 10;
pub const FAMILY_SEED: u64 = 0x11_0e_71_11e;

/// `x^(mu+1/2) Q(x^2) e^(-c |x|^2)` with small random `Q` of degree <= 2 and
/// `c` cycling through [`FAMILY_DECAYS`]; deterministic for a given seed.
pub fn test_family(mu: &MuVector, size: usize, seed: u64) -> Vec<SymbolicHFunction> {
    let n = mu.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|i| {
            let (p, q) = FAMILY_DECAYS[i % FAMILY_DECAYS.len()];
            let terms: Vec<_> = graded_enumerate(n, 2)
                .into_iter()
                .map(|k| {
                    let num: i64 = rng.gen_range(-6..=6);
                    (k, Rational::new(num.into(), rng.gen_range(1i64..=3).into()))
                })
                .collect();
            let mut poly = crate::symbolic::EvenPolynomial::from_terms(n, terms).expect("dims agree");
            if poly.is_zero() {
                poly = crate::symbolic::EvenPolynomial::one(n);
            }
            SymbolicHFunction::new(mu.clone(), poly, rational::ratio(p, q)).expect("valid family member")
        })
        .collect()
}

pub fn default_family(mu: &MuVector) -> Vec<SymbolicHFunction> {
    test_family(mu, FAMILY_SIZE, FAMILY_SEED)
}

/// Precomputed `h_mu(P[y^2] phi)` on the outer quadrature nodes, with the
/// rules used for both integrals.
#[derive(Clone, Debug)]
pub struct TransformedProbe {
    pub outer: QuadratureRule,
    /// `w * h_mu(P[y^2] phi)` at the tensor nodes of `outer`.
    pub weighted: Vec<f64>,
}

/// Transforms `P[y^2] phi` once so it can be paired against many `f`.
pub fn transform_probe(p: &OperatorPoly, phi: &SymbolicHFunction) -> Result<TransformedProbe> {
    let n = phi.dim();
    let c = rational::to_f64(&phi.decay);
    if !(c > 0.0) {
        return Err(Error::DecayRequired);
    }
    let inner = QuadratureRule::for_decay(c)?;
    let outer = QuadratureRule::for_decay(1.0 / (4.0 * c))?;
    let probe = phi.with_u(crate::symbolic::UForm::new(
        phi.poly.mul(&p.squared_argument()),
        phi.decay.clone(),
    ));
    let g = probe.compile();
    let nodes = GridSpec::from_rule(n, &outer)?;
    let h = hankel_nd(&phi.mu, |x| g.eval_unchecked(x), &nodes, &inner)?;
    let weighted = h
        .values
        .iter()
        .zip(tensor_weights(n, &outer))
        .map(|(v, w)| v * w)
        .collect();
    Ok(TransformedProbe { outer, weighted })
}

/// `|(f, h_mu(P[y^2] phi))| / (|f|, |h_mu(P[y^2] phi)|)`.
pub fn weak_residual(f: &SymbolicHFunction, probe: &TransformedProbe) -> Result<f64> {
    let n = f.dim();
    let nodes = GridSpec::from_rule(n, &probe.outer)?;
    let fv = crate::hankel::sample_grid(&nodes, {
        let fc = f.compile();
        move |x| fc.eval_unchecked(x)
    });
    let (mut sum, mut scale) = (0.0, 0.0);
    for (a, b) in fv.iter().zip(&probe.weighted) {
        sum += a * b;
        scale += (a * b).abs();
    }
    Ok(if scale == 0.0 { 0.0 } else { sum.abs() / scale })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakCheck {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Maximum normalised `(f, h_mu(P[y^2] phi))` over `family`.
pub fn weak_spectral_check(
    f: &SymbolicHFunction,
    p: &OperatorPoly,
    mu: &MuVector,
    family: &[SymbolicHFunction],
) -> Result<WeakCheck> {
    if f.mu != *mu {
        return Err(Error::Domain("f has a different mu".into()));
    }
    mu.check_dim(p.dim())?;
    let residuals = family
        .iter()
        .map(|phi| weak_residual(f, &transform_probe(p, phi)?))
        .collect::<Result<Vec<f64>>>()?;
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(WeakCheck {
        residuals,
        max_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementCertificate {
    /// Number of nonzero terms of `L f`, computed exactly.
    pub exact_residual_terms: usize,
    pub weak: WeakCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub hypothesis: HypothesisReport,
    pub elements: Vec<ElementCertificate>,
}

impl Certificate {
    pub fn max_weak_residual(&self) -> f64 {
        self.elements.iter().map(|e| e.weak.max_residual).fold(0.0, f64::max)
    }

    pub fn exact(&self) -> bool {
        self.elements.iter().all(|e| e.exact_residual_terms == 0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleSolution {
    pub basis: Vec<SymbolicHFunction>,
    pub certificate: Certificate,
}

/// Kernel of `L = sum (-1)^|alpha| a_alpha S^alpha` on `x^(mu+1/2) Q(x^2)`, `deg Q <= D`,
/// with exact residuals and the weak check on the default family.
pub fn liouville_solve(p: &OperatorPoly, mu: &MuVector, max_degree: u32) -> Result<LiouvilleSolution> {
    liouville_solve_with(p, mu, max_degree, &default_family(mu))
}

pub fn liouville_solve_with(
    p: &OperatorPoly,
    mu: &MuVector,
    max_degree: u32,
    family: &[SymbolicHFunction],
) -> Result<LiouvilleSolution> {
    mu.check_dim(p.dim())?;
    let hypothesis = check_hypothesis(p);
    if !hypothesis.pass {
        return Err(Error::HypothesisFailed(
            hypothesis.reason.clone().unwrap_or_else(|| "hypothesis failed".into()),
        ));
    }
    let basis = kernel_basis(p, mu, max_degree)?;
    let probes = family
        .iter()
        .map(|phi| transform_probe(p, phi))
        .collect::<Result<Vec<_>>>()?;
    let elements = basis
        .iter()
        .map(|f| {
            let exact_residual_terms = apply_l(p, mu, f)?.poly.len();
            let residuals = probes
                .iter()
                .map(|pr| weak_residual(f, pr))
                .collect::<Result<Vec<f64>>>()?;
            let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
            Ok(ElementCertificate {
                exact_residual_terms,
                weak: WeakCheck {
                    residuals,
                    max_residual,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LiouvilleSolution {
        basis,
        certificate: Certificate {
            hypothesis,
            elements,
        },
    })
}

/// The shipped negative control: `f = x^(mu+1/2) x^2` (first axis) against `P = sum x_i`.
pub fn negative_control(mu: &MuVector) -> Result<WeakCheck> {
    let n = mu.dim();
    let f = SymbolicHFunction::new(
        mu.clone(),
        crate::symbolic::EvenPolynomial::monomial(crate::multiindex::MultiIndex::unit(n, 0), Rational::from_integer(1.into())),
        Rational::from_integer(0.into()),
    )?;
    weak_spectral_check(&f, &OperatorPoly::linear_sum(n), mu, &default_family(mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn one_dimensional_laplacian() {
        let mu = MuVector::from_ratios(&[(1, 2)]).unwrap();
        let sol = liouville_solve(&OperatorPoly::linear_sum(1), &mu, 3).unwrap();
        assert_eq!(sol.basis.len(), 1);
        assert!(sol.certificate.exact());
        assert!(sol.certificate.max_weak_residual() <= 1e-6, "{:?}", sol.certificate);
    }

    #[test]
    fn identity_has_no_solutions() {
        let mu = MuVector::from_ratios(&[(0, 1)]).unwrap();
        let sol = liouville_solve(&OperatorPoly::constant(1, int(1)).unwrap(), &mu, 4).unwrap();
        assert!(sol.basis.is_empty());
    }

    #[test]
    fn failed_hypothesis() {
        let p = OperatorPoly::new(2, [([1, 1].into(), int(1))]).unwrap();
        let mu = MuVector::from_ratios(&[(0, 1), (0, 1)]).unwrap();
        assert!(matches!(liouville_solve(&p, &mu, 1), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn negative_control_is_large() {
        let mu = MuVector::from_ratios(&[(1, 2)]).unwrap();
        let w = negative_control(&mu).unwrap();
        assert!(w.max_residual >= 0.1, "{w:?}");
    }

    #[test]
    fn family_is_deterministic() {
        let mu = MuVector::from_ratios(&[(1, 2), (0, 1)]).unwrap();
        assert_eq!(default_family(&mu), default_family(&mu));
        assert_eq!(default_family(&mu).len(), FAMILY_SIZE);
    }
}
