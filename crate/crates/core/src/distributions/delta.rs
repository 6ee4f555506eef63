//! Point-supported functionals `sum_k c_k T^k delta_mu` and their pairings.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::richardson_limit;
use crate::multiindex::MultiIndex;
use crate::rational::{self, Rational};
use crate::special::{c_k_mu_exact, c_mu, MuVector};
use crate::symbolic::{
    apply_sk_u, apply_tk, koh_zemanian_multi, EvenPolynomial, SymbolicHFunction, UForm,
};

use super::cutoff::Window;

/// `x^(mu+1/2) u(x) W(|x|^2)` with `u` in the closed family and `W` a radial window.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub mu: MuVector,
    pub u: UForm,
    pub window: Window,
}

impl TestFunction {
    pub fn new(mu: MuVector, u: UForm, window: Window) -> Result<Self> {
        mu.check_dim(u.dim())?;
        Ok(TestFunction { mu, u, window })
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    /// `T^k` of the windowed u-part at `x`, by the Leibniz rule.
    pub fn tk_at(&self, k: &MultiIndex, x: &[f64]) -> f64 {
        if matches!(self.window, Window::None) {
            return apply_tk(k, &self.u).eval(x);
        }
        let wd = self.window.t_derivatives(x, k.length() as usize);
        let mut sum = 0.0;
        for j in k.below() {
            let rest = k.checked_sub(&j).expect("j <= k");
            let b = k.binomial(&j).expect("j <= k").to_f64().unwrap_or(f64::INFINITY);
            sum += b * apply_tk(&rest, &self.u).eval(x) * wd[j.length() as usize];
        }
        sum
    }

    /// `lim_{x -> 0} T^k(u W)`: windows are constant near the origin.
    pub fn tk_at_origin(&self, k: &MultiIndex) -> Rational {
        match self.window.at_origin() {
            w if w == 0.0 => Rational::zero(),
            _ => apply_tk(k, &self.u).value_at_origin(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut prefix = 1.0;
        for (i, xi) in x.iter().enumerate() {
            prefix *= xi.powf(self.mu.order_f64(i) + 0.5);
        }
        prefix * self.u.eval(x) * self.window.eval(x)
    }
}

impl From<&SymbolicHFunction> for TestFunction {
    fn from(f: &SymbolicHFunction) -> Self {
        TestFunction {
            mu: f.mu.clone(),
            u: f.u_part(),
            window: Window::None,
        }
    }
}

fn check(k: &MultiIndex, mu: &MuVector, phi: &SymbolicHFunction) -> Result<()> {
    mu.check_dim(k.dim())?;
    if phi.mu != *mu {
        return Err(Error::Domain("pairing order differs from the function's mu".into()));
    }
    Ok(())
}

/// `lim_{x -> 0+} T^k u`, read exactly from the constant term of the symbolic image.
pub fn pair_delta_reduced(k: &MultiIndex, mu: &MuVector, phi: &SymbolicHFunction) -> Result<Rational> {
    check(k, mu, phi)?;
    Ok(apply_tk(k, &phi.u_part()).value_at_origin())
}

/// `(T^k delta_mu, phi) = C_mu lim_{x -> 0+} T^k u`, limit read exactly.
pub fn pair_delta_exact(k: &MultiIndex, mu: &MuVector, phi: &SymbolicHFunction) -> Result<f64> {
    Ok(c_mu(mu)? * rational::to_f64(&pair_delta_reduced(k, mu, phi)?))
}

/// `(T^k delta_mu, phi)`. Decay-free inputs use the exact constant term; decaying
/// ones extrapolate `T^k u(h, ..., h)` to `h = 0` along `h = 2^-j`.
pub fn pair_delta(k: &MultiIndex, mu: &MuVector, phi: &SymbolicHFunction) -> Result<f64> {
    check(k, mu, phi)?;
    if phi.decay.is_zero() {
        return pair_delta_exact(k, mu, phi);
    }
    Ok(c_mu(mu)? * pair_delta_limit(k, phi)?)
}

/// Extrapolated `lim T^k u` along the diagonal.
pub fn pair_delta_limit(k: &MultiIndex, phi: &SymbolicHFunction) -> Result<f64> {
    let image = apply_tk(k, &phi.u_part()).compile();
    let n = phi.dim();
    Ok(richardson_limit(|h| image.eval(&vec![h; n]))?.value)
}

/// `h_mu T^k delta_mu = C_k^mu t^(mu+1/2) t^(2k)`.
pub fn hankel_delta(k: &MultiIndex, mu: &MuVector) -> Result<SymbolicHFunction> {
    mu.check_dim(k.dim())?;
    let c = c_k_mu_exact(mu, k)?;
    SymbolicHFunction::new(mu.clone(), EvenPolynomial::monomial(k.clone(), c), Rational::zero())
}

/// `sum_k c_k T^k delta_mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeltaRepr", into = "DeltaRepr")]
pub struct DeltaCombination {
    pub mu: MuVector,
    pub coeffs: BTreeMap<MultiIndex, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeltaRepr {
    mu: MuVector,
    terms: Vec<DeltaTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeltaTerm {
    k: MultiIndex,
    c: f64,
}

impl TryFrom<DeltaRepr> for DeltaCombination {
    type Error = Error;
    fn try_from(r: DeltaRepr) -> Result<Self> {
        DeltaCombination::new(r.mu, r.terms.into_iter().map(|t| (t.k, t.c)))
    }
}

impl From<DeltaCombination> for DeltaRepr {
    fn from(d: DeltaCombination) -> Self {
        DeltaRepr {
            mu: d.mu,
            terms: d.coeffs.into_iter().map(|(k, c)| DeltaTerm { k, c }).collect(),
        }
    }
}

impl DeltaCombination {
    pub fn new(mu: MuVector, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            mu.check_dim(k.dim())?;
            if !c.is_finite() {
                return Err(Error::Domain(format!("coefficient of T^{k} delta is not finite")));
            }
            *coeffs.entry(k).or_insert(0.0) += c;
        }
        coeffs.retain(|_, c| *c != 0.0);
        Ok(DeltaCombination { mu, coeffs })
    }

    pub fn delta(mu: MuVector) -> Self {
        let n = mu.dim();
        DeltaCombination {
            mu,
            coeffs: BTreeMap::from([(MultiIndex::zero(n), 1.0)]),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: &MultiIndex) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `sum_k c_k C_mu lim T^k(u W)`, limits read exactly.
    pub fn pair(&self, phi: &TestFunction) -> Result<f64> {
        if phi.mu != self.mu {
            return Err(Error::Domain("pairing order differs from the function's mu".into()));
        }
        let cm = c_mu(&self.mu)?;
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| c * cm * rational::to_f64(&phi.tk_at_origin(k)))
            .sum())
    }

    /// `T^k delta_mu` coefficients of `sum_k s_k S^k delta_mu`.
    ///
    /// `(S^k delta, phi) = C_mu lim x^(-mu-1/2) S^k phi = C_mu lim sum_l b_{l,k} x^(2l) T^(k+l) u`
    /// and only `l = 0` survives at the origin, so `S^k delta = b_{0,k} T^k delta`.
    pub fn from_s_form(mu: MuVector, s: &BTreeMap<MultiIndex, Rational>) -> Result<Self> {
        let exact = s_to_t_exact(&mu, s)?;
        Self::new(mu, exact.iter().map(|(k, c)| (k.clone(), rational::to_f64(c))))
    }
}

/// Exact `T^k delta` coefficients of an `S^k delta` combination.
pub fn s_to_t_exact(
    mu: &MuVector,
    s: &BTreeMap<MultiIndex, Rational>,
) -> Result<BTreeMap<MultiIndex, Rational>> {
    let mut out = BTreeMap::new();
    for (k, c) in s {
        mu.check_dim(k.dim())?;
        let b0 = koh_zemanian_multi(k, mu)
            .get(&MultiIndex::zero(k.dim()))
            .cloned()
            .unwrap_or_else(Rational::zero);
        let v = c * b0;
        if !v.is_zero() {
            out.insert(k.clone(), v);
        }
    }
    Ok(out)
}

/// `lim x^(-mu-1/2) S^k phi`, exactly.
pub fn pair_s_delta_reduced(k: &MultiIndex, mu: &MuVector, phi: &SymbolicHFunction) -> Result<Rational> {
    check(k, mu, phi)?;
    Ok(apply_sk_u(k, mu, &phi.u_part()).value_at_origin())
}

/// Exact reduced pairing of `sum_k t_k T^k delta` against `phi` (divided by `C_mu`).
pub fn pair_t_combination_reduced(
    mu: &MuVector,
    t: &BTreeMap<MultiIndex, Rational>,
    phi: &SymbolicHFunction,
) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (k, c) in t {
        acc += c * pair_delta_reduced(k, mu, phi)?;
    }
    Ok(acc)
}

/// `1 / (2^|k| k!)` as an exact rational.
pub fn taylor_weight(k: &MultiIndex) -> Rational {
    let d = k.factorial() * (num_bigint::BigUint::one() << k.length() as usize);
    Rational::new(1.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::special::c_mu;

    fn mu1(p: i64, q: i64) -> MuVector {
        MuVector::from_ratios(&[(p, q)]).unwrap()
    }

    #[test]
    fn pair_delta_examples() {
        for m in [mu1(-1, 2), mu1(0, 1), mu1(1, 2), mu1(3, 2)] {
            let cm = c_mu(&m).unwrap();
            let g = SymbolicHFunction::gaussian(m.clone(), ratio(1, 2));
            let v0 = pair_delta(&MultiIndex::zero(1), &m, &g).unwrap();
            assert!((v0 - cm).abs() < 1e-12 * cm);
            let v1 = pair_delta(&MultiIndex::from([1]), &m, &g).unwrap();
            assert!((v1 + cm).abs() < 1e-12 * cm);
            let x4 = SymbolicHFunction::new(m.clone(), EvenPolynomial::monomial([2].into(), int(1)), int(0)).unwrap();
            assert_eq!(pair_delta(&MultiIndex::from([2]), &m, &x4).unwrap(), 8.0 * cm);
        }
    }

    #[test]
    fn hankel_delta_examples() {
        let m = mu1(1, 2);
        let h = hankel_delta(&MultiIndex::zero(1), &m).unwrap();
        assert_eq!(h.poly, EvenPolynomial::one(1));
        let h = hankel_delta(&MultiIndex::from([1]), &m).unwrap();
        assert_eq!(h.poly, EvenPolynomial::monomial([1].into(), ratio(-1, 3)));
        let m2 = MuVector::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        let h = hankel_delta(&MultiIndex::from([1, 0]), &m2).unwrap();
        assert_eq!(h.poly, EvenPolynomial::monomial([1, 0].into(), ratio(-1, 3)));
    }

    #[test]
    fn taylor_orthogonality() {
        let m = MuVector::from_ratios(&[(0, 1), (1, 3)]).unwrap();
        for len in 1..=4 {
            for k in crate::multiindex::with_length(2, len) {
                let f = SymbolicHFunction::new(m.clone(), EvenPolynomial::monomial(k.clone(), int(1)), int(0)).unwrap();
                for j in crate::multiindex::with_length(2, len) {
                    let v = pair_delta_reduced(&j, &m, &f).unwrap();
                    if j == k {
                        assert_eq!(v, Rational::one() / taylor_weight(&k));
                    } else {
                        assert!(v.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn s_form_re_expansion_is_exact() {
        let m = MuVector::from_ratios(&[(1, 2), (-1, 2)]).unwrap();
        let s: BTreeMap<MultiIndex, Rational> = [
            (MultiIndex::from([0, 0]), int(2)),
            (MultiIndex::from([1, 0]), ratio(-1, 3)),
            (MultiIndex::from([1, 2]), ratio(5, 7)),
        ]
        .into();
        let t = s_to_t_exact(&m, &s).unwrap();
        let phi = SymbolicHFunction::new(
            m.clone(),
            EvenPolynomial::from_terms(2, [([0, 0].into(), int(1)), ([1, 1].into(), ratio(2, 5)), ([2, 2].into(), int(-3))]).unwrap(),
            ratio(1, 2),
        )
        .unwrap();
        let lhs: Rational = s
            .iter()
            .map(|(k, c)| c * pair_s_delta_reduced(k, &m, &phi).unwrap())
            .sum();
        assert_eq!(lhs, pair_t_combination_reduced(&m, &t, &phi).unwrap());
    }

    #[test]
    fn delta_json_schema() {
        let d = DeltaCombination::new(mu1(1, 2), [(MultiIndex::from([0]), 2.0), (MultiIndex::from([1]), -1.0)]).unwrap();
        let j = serde_json::to_value(&d).unwrap();
        assert_eq!(j["terms"][1]["k"], serde_json::json!([1]));
        assert_eq!(j["terms"][1]["c"], serde_json::json!(-1.0));
        let back: DeltaCombination = serde_json::from_value(j).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn windowed_derivatives_match_plain_near_origin() {
        use super::super::cutoff::CutoffSpec;
        let m = mu1(0, 1);
        let u = UForm::new(EvenPolynomial::monomial([2].into(), int(1)), ratio(1, 2));
        let plain = TestFunction::new(m.clone(), u.clone(), Window::None).unwrap();
        let cut = TestFunction::new(m, u, Window::Inner(CutoffSpec::from_radius(2.0).unwrap())).unwrap();
        for k in 0..4u32 {
            let k = MultiIndex::from([k]);
            assert_eq!(plain.tk_at(&k, &[0.5]), cut.tk_at(&k, &[0.5]));
            assert_eq!(cut.tk_at(&k, &[2.5]), 0.0);
        }
    }
}
