//! Coefficient recovery for functionals supported at the origin.

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::multiindex::graded_enumerate;
use crate::rational::{self, Rational};
use crate::special::{c_mu, MuVector};
use crate::symbolic::{EvenPolynomial, UForm};

use super::cutoff::{CutoffSpec, Window};
use super::delta::{taylor_weight, DeltaCombination, TestFunction};

/// Number of far-supported probes used to check the support hypothesis.
pub const SUPPORT_PROBES: usize = 5;
pub const SUPPORT_TOL: f64 = 1e-8;

/// Deterministic probes `x^(mu+1/2) Q(x^2) e^(-|x|^2/2) (1 - psi)` with `Q`
/// random, vanishing on `|x| <= a`.
pub fn far_probes(mu: &MuVector, a: f64, count: usize, seed: u64) -> Result<Vec<TestFunction>> {
    let n = mu.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = Window::Outer(CutoffSpec::new(a, 2.0 * a)?);
    (0..count)
        .map(|_| {
            let terms = graded_enumerate(n, 2)
                .into_iter()
                .map(|k| (k, Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=4).into())));
            let poly = EvenPolynomial::from_terms(n, terms)?;
            TestFunction::new(mu.clone(), UForm::new(poly, rational::ratio(1, 2)), window.clone())
        })
        .collect()
}

/// `c_k = F(x^(mu+1/2) x^(2k) psi) / (C_mu 2^|k| k!)` for `|k| <= order`.
///
/// `F` is first evaluated on [`SUPPORT_PROBES`] functions supported in
/// `|x| >= cut.outer`; any value above [`SUPPORT_TOL`] is a `SupportViolation`.
pub fn reconstruct_point_supported(
    mut pairing: impl FnMut(&TestFunction) -> f64,
    mu: &MuVector,
    order: u32,
    cut: &CutoffSpec,
) -> Result<DeltaCombination> {
    for probe in far_probes(mu, cut.outer, SUPPORT_PROBES, 0x5eed)? {
        let v = pairing(&probe);
        if !(v.abs() <= SUPPORT_TOL) {
            return Err(Error::SupportViolation { value: v });
        }
    }
    let n = mu.dim();
    let cm = c_mu(mu)?;
    let mut terms = Vec::new();
    for k in graded_enumerate(n, order) {
        let probe = TestFunction::new(
            mu.clone(),
            UForm::polynomial(EvenPolynomial::monomial(k.clone(), Rational::one())),
            Window::Inner(cut.clone()),
        )?;
        let c = pairing(&probe) * rational::to_f64(&taylor_weight(&k)) / cm;
        terms.push((k, c));
    }
    DeltaCombination::new(mu.clone(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;

    #[test]
    fn recovers_delta() {
        let mu = MuVector::from_ratios(&[(1, 2), (0, 1)]).unwrap();
        let d = DeltaCombination::delta(mu.clone());
        let cut = CutoffSpec::from_radius(1.0).unwrap();
        let got = reconstruct_point_supported(|f| d.pair(f).unwrap(), &mu, 3, &cut).unwrap();
        assert!((got.coeff(&MultiIndex::zero(2)) - 1.0).abs() < 1e-12);
        assert!(got.coeffs.iter().filter(|(k, _)| !k.is_zero()).all(|(_, c)| c.abs() <= 1e-8));
    }

    #[test]
    fn recovers_combination() {
        let mu = MuVector::from_ratios(&[(3, 2)]).unwrap();
        let d = DeltaCombination::new(mu.clone(), [(MultiIndex::from([0]), 2.0), (MultiIndex::from([1]), -1.0)]).unwrap();
        let cut = CutoffSpec::from_radius(0.5).unwrap();
        let got = reconstruct_point_supported(|f| d.pair(f).unwrap(), &mu, 2, &cut).unwrap();
        assert!((got.coeff(&MultiIndex::from([0])) - 2.0).abs() < 1e-8);
        assert!((got.coeff(&MultiIndex::from([1])) + 1.0).abs() < 1e-8);
        assert!(got.coeff(&MultiIndex::from([2])).abs() < 1e-8);
    }

    #[test]
    fn zero_functional() {
        let mu = MuVector::from_ratios(&[(0, 1)]).unwrap();
        let got = reconstruct_point_supported(|_| 0.0, &mu, 2, &CutoffSpec::from_radius(1.0).unwrap()).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn support_violation() {
        let mu = MuVector::from_ratios(&[(0, 1)]).unwrap();
        // pairing by point evaluation at x = 3 sees far-supported probes
        let r = reconstruct_point_supported(|f| f.eval(&[3.0]), &mu, 1, &CutoffSpec::from_radius(1.0).unwrap());
        assert!(matches!(r, Err(Error::SupportViolation { .. })));
    }
}
