//! Exact calculus on the family `x^(mu+1/2) Q(x1^2, ..., xn^2) exp(-c |x|^2)`.
//!
//! Operators act on u-parts `u = x^(-mu-1/2) phi = Q(x^2) exp(-c |x|^2)`
//! ([`UForm`]); the power prefix of a [`SymbolicHFunction`] is metadata and is
//! never differentiated.

mod hypothesis;
mod kernel;
mod koh_zemanian;
mod ops;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::rational::{self, Rational};
use crate::special::MuVector;

pub use hypothesis::{check_hypothesis, HypothesisReport, SIMPLEX_GRID_POINTS};
pub use kernel::{kernel_basis, operator_matrix, KernelMatrix};
pub use koh_zemanian::{apply_koh_zemanian, koh_zemanian_coeffs, koh_zemanian_multi};
pub use ops::{
    apply_l, apply_s, apply_s_u, apply_sk, apply_sk_u, apply_t, apply_tk, leibniz_tk,
};

/// `Q(x1^2, ..., xn^2) = sum_k q_k x^(2k)` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct EvenPolynomial {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Rational>,
}

impl EvenPolynomial {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        EvenPolynomial {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::monomial(MultiIndex::zero(dim), Rational::one())
    }

    pub fn constant(dim: usize, q: Rational) -> Self {
        Self::monomial(MultiIndex::zero(dim), q)
    }

    /// `q x^(2k)`.
    pub fn monomial(k: MultiIndex, q: Rational) -> Self {
        let mut p = Self::zero(k.dim());
        p.add_term(k, q);
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (k, q) in terms {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            p.add_term(k, q);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: &MultiIndex) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Largest `|k|` among stored terms, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(MultiIndex::length).max()
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&MultiIndex, &Rational)> {
        self.coeffs.iter().next_back()
    }

    pub fn add_term(&mut self, k: MultiIndex, q: Rational) {
        assert_eq!(k.dim(), self.dim, "dimension mismatch");
        if q.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(k) {
            Entry::Vacant(e) => {
                e.insert(q);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += q;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &EvenPolynomial) -> EvenPolynomial {
        let mut out = self.clone();
        for (k, q) in &other.coeffs {
            out.add_term(k.clone(), q.clone());
        }
        out
    }

    pub fn sub(&self, other: &EvenPolynomial) -> EvenPolynomial {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> EvenPolynomial {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        EvenPolynomial {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(k, q)| (k.clone(), q * s)).collect(),
        }
    }

    pub fn mul(&self, other: &EvenPolynomial) -> EvenPolynomial {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = Self::zero(self.dim);
        for (ka, qa) in &self.coeffs {
            for (kb, qb) in &other.coeffs {
                out.add_term(ka.add(kb), qa * qb);
            }
        }
        out
    }

    /// Multiplies by `x^(2s)`.
    pub fn shift(&self, s: &MultiIndex) -> EvenPolynomial {
        EvenPolynomial {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(k, q)| (k.add(s), q.clone())).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.compile().eval(x)
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .coeffs
                .iter()
                .map(|(k, q)| (k.entries().to_vec(), rational::to_f64(q)))
                .collect(),
        }
    }
}

impl fmt::Debug for EvenPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, q)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})x^2{}", rational::format(q), k)?;
        }
        Ok(())
    }
}

/// Floating-point evaluator for an [`EvenPolynomial`].
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (k, q) in &self.terms {
            let mut t = *q;
            for (xi, &ki) in x.iter().zip(k) {
                if ki > 0 {
                    t *= (xi * xi).powi(ki as i32);
                }
            }
            sum += t;
        }
        sum
    }
}

/// A u-part `Q(x^2) exp(-c |x|^2)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UForm {
    pub poly: EvenPolynomial,
    pub decay: Rational,
}

impl UForm {
    pub fn new(poly: EvenPolynomial, decay: Rational) -> Self {
        UForm { poly, decay }
    }

    pub fn polynomial(poly: EvenPolynomial) -> Self {
        UForm {
            poly,
            decay: Rational::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Pointwise product; polynomials multiply and decay rates add.
    pub fn mul(&self, other: &UForm) -> UForm {
        UForm {
            poly: self.poly.mul(&other.poly),
            decay: &self.decay + &other.decay,
        }
    }

    /// Sum of two forms sharing a decay rate.
    pub fn add(&self, other: &UForm) -> Result<UForm> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.decay != other.decay {
            return Err(Error::Domain(
                "cannot add u-forms with different decay rates".into(),
            ));
        }
        Ok(UForm {
            poly: self.poly.add(&other.poly),
            decay: self.decay.clone(),
        })
    }

    /// `lim_{x -> 0+} u(x)`: the constant coefficient, since the Gaussian is 1 there.
    pub fn value_at_origin(&self) -> Rational {
        self.poly.constant_term()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.compile().eval(x)
    }

    pub fn compile(&self) -> CompiledUForm {
        CompiledUForm {
            poly: self.poly.compile(),
            decay: rational::to_f64(&self.decay),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompiledUForm {
    poly: CompiledPoly,
    decay: f64,
}

impl CompiledUForm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let p = self.poly.eval(x);
        if self.decay == 0.0 || p == 0.0 {
            return p;
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        p * (-self.decay * r2).exp()
    }
}

/// `x^(mu+1/2) Q(x^2) exp(-c |x|^2)`. With `decay = 0` this is the polynomial
/// solution form; with `decay > 0` a genuine test function.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "SymbolicRepr", into = "SymbolicRepr")]
pub struct SymbolicHFunction {
    pub mu: MuVector,
    pub poly: EvenPolynomial,
    pub decay: Rational,
}

impl SymbolicHFunction {
    pub fn new(mu: MuVector, poly: EvenPolynomial, decay: Rational) -> Result<Self> {
        mu.check_dim(poly.dim())?;
        if decay.is_negative() {
            return Err(Error::Domain("decay rate must be >= 0".into()));
        }
        Ok(SymbolicHFunction { mu, poly, decay })
    }

    pub fn from_u(mu: MuVector, u: UForm) -> Result<Self> {
        Self::new(mu, u.poly, u.decay)
    }

    /// `x^(mu+1/2) exp(-c |x|^2)`.
    pub fn gaussian(mu: MuVector, decay: Rational) -> Self {
        let n = mu.dim();
        Self::new(mu, EvenPolynomial::one(n), decay).expect("dimensions agree")
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn u_part(&self) -> UForm {
        UForm::new(self.poly.clone(), self.decay.clone())
    }

    pub fn with_u(&self, u: UForm) -> SymbolicHFunction {
        SymbolicHFunction {
            mu: self.mu.clone(),
            poly: u.poly,
            decay: u.decay,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Point evaluation on the open positive orthant.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.compile().eval(x)
    }

    pub fn compile(&self) -> CompiledH {
        CompiledH {
            exponents: self.mu.to_f64().iter().map(|m| m + 0.5).collect(),
            u: self.u_part().compile(),
        }
    }
}

/// Floating-point evaluator for a [`SymbolicHFunction`].
#[derive(Clone, Debug)]
pub struct CompiledH {
    exponents: Vec<f64>,
    u: CompiledUForm,
}

impl CompiledH {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.exponents.len() {
            return Err(Error::DimensionMismatch {
                expected: self.exponents.len(),
                got: x.len(),
            });
        }
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Domain(format!(
                "evaluation point {x:?} is outside the open positive orthant"
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut prefix = 1.0;
        for (xi, e) in x.iter().zip(&self.exponents) {
            prefix *= xi.powf(*e);
        }
        prefix * self.u.eval(x)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolicRepr {
    mu: MuVector,
    #[serde(with = "rational", default = "Rational::zero")]
    decay: Rational,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    k: MultiIndex,
    #[serde(with = "rational")]
    q: Rational,
}

impl TryFrom<SymbolicRepr> for SymbolicHFunction {
    type Error = Error;
    fn try_from(r: SymbolicRepr) -> Result<Self> {
        let poly = EvenPolynomial::from_terms(r.mu.dim(), r.terms.into_iter().map(|t| (t.k, t.q)))?;
        SymbolicHFunction::new(r.mu, poly, r.decay)
    }
}

impl From<SymbolicHFunction> for SymbolicRepr {
    fn from(f: SymbolicHFunction) -> Self {
        SymbolicRepr {
            terms: f
                .poly
                .coeffs
                .into_iter()
                .map(|(k, q)| TermRepr { k, q })
                .collect(),
            mu: f.mu,
            decay: f.decay,
        }
    }
}

/// Serde helpers writing an [`EvenPolynomial`] as `[{"k": [..], "q": "n/d"}, ..]`;
/// the dimension is read from the first term, so the list must be nonempty.
pub mod poly_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &EvenPolynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = p
            .coeffs
            .iter()
            .map(|(k, q)| TermRepr {
                k: k.clone(),
                q: q.clone(),
            })
            .collect();
        terms.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<EvenPolynomial, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let dim = terms
            .first()
            .map(|t| t.k.dim())
            .ok_or_else(|| serde::de::Error::custom("polynomial needs at least one term"))?;
        EvenPolynomial::from_terms(dim, terms.into_iter().map(|t| (t.k, t.q))).map_err(serde::de::Error::custom)
    }
}

/// `P[x] = sum_alpha a_alpha x^alpha`, which also encodes
/// `L = sum_alpha (-1)^|alpha| a_alpha S^alpha`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct OperatorPoly {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Rational>,
}

impl OperatorPoly {
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Result<Self> {
        let mut coeffs: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (k, a) in terms {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            *coeffs.entry(k).or_insert_with(Rational::zero) += a;
        }
        coeffs.retain(|_, a| !a.is_zero());
        if coeffs.is_empty() {
            return Err(Error::Domain(
                "operator polynomial has no nonzero coefficient".into(),
            ));
        }
        Ok(OperatorPoly { dim, coeffs })
    }

    /// `P = c` (so `L = c * identity`).
    pub fn constant(dim: usize, c: Rational) -> Result<Self> {
        Self::new(dim, [(MultiIndex::zero(dim), c)])
    }

    /// `P = x1 + ... + xn`, i.e. `L = -S_mu`.
    pub fn linear_sum(dim: usize) -> Self {
        Self::new(dim, (0..dim).map(|i| (MultiIndex::unit(dim, i), Rational::one())))
            .expect("nonempty")
    }

    /// `P = x1^2 + ... + xn^2`.
    pub fn square_sum(dim: usize) -> Self {
        Self::new(
            dim,
            (0..dim).map(|i| (MultiIndex::unit(dim, i).with(i, 2), Rational::one())),
        )
        .expect("nonempty")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Rational {
        self.coeffs.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    /// `N = max |alpha|` over nonzero coefficients.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::length).max().unwrap_or(0)
    }

    /// `P[x]` at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(a, q)| {
                let mut t = rational::to_f64(q);
                for (xi, &ai) in x.iter().zip(a.entries()) {
                    t *= xi.powi(ai as i32);
                }
                t
            })
            .sum()
    }

    /// `P[x1^2, ..., xn^2]` as an even polynomial.
    pub fn squared_argument(&self) -> EvenPolynomial {
        EvenPolynomial::from_terms(self.dim, self.coeffs.iter().map(|(a, q)| (a.clone(), q.clone())))
            .expect("dimensions agree")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorRepr {
    terms: Vec<OperatorTermRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorTermRepr {
    k: MultiIndex,
    #[serde(with = "rational")]
    a: Rational,
}

impl TryFrom<OperatorRepr> for OperatorPoly {
    type Error = Error;
    fn try_from(r: OperatorRepr) -> Result<Self> {
        let dim = r
            .terms
            .first()
            .map(|t| t.k.dim())
            .ok_or_else(|| Error::Domain("operator polynomial has no terms".into()))?;
        OperatorPoly::new(dim, r.terms.into_iter().map(|t| (t.k, t.a)))
    }
}

impl From<OperatorPoly> for OperatorRepr {
    fn from(p: OperatorPoly) -> Self {
        OperatorRepr {
            terms: p
                .coeffs
                .into_iter()
                .map(|(k, a)| OperatorTermRepr { k, a })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn mu(p: &[(i64, i64)]) -> MuVector {
        MuVector::from_ratios(p).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = SymbolicHFunction::new(mu(&[(1, 2)]), EvenPolynomial::one(1), int(0)).unwrap();
        assert!((f.eval(&[2.0]).unwrap() - 2.0).abs() < 1e-15);
        let g = SymbolicHFunction::new(
            mu(&[(1, 2)]),
            EvenPolynomial::monomial([1].into(), int(1)),
            int(0),
        )
        .unwrap();
        assert!((g.eval(&[2.0]).unwrap() - 8.0).abs() < 1e-14);
        let h = SymbolicHFunction::gaussian(mu(&[(1, 2)]), ratio(1, 2));
        assert!((h.eval(&[1.0]).unwrap() - 0.606_530_659_7).abs() < 1e-10);
        assert!(matches!(h.eval(&[0.0]), Err(Error::Domain(_))));
        assert!(matches!(h.eval(&[-1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn polynomial_arithmetic_drops_zeros() {
        let a = EvenPolynomial::monomial([1, 0].into(), int(2));
        let b = EvenPolynomial::monomial([1, 0].into(), int(-2));
        assert!(a.add(&b).is_zero());
        assert_eq!(a.sub(&a).len(), 0);
        let c = a.mul(&EvenPolynomial::monomial([0, 2].into(), ratio(1, 2)));
        assert_eq!(c.coeff(&[1, 2].into()), int(1));
        assert_eq!(c.degree(), Some(3));
    }

    #[test]
    fn symbolic_json_schema() {
        let text = r#"{"mu":["1/2","0"],"decay":"1/2","terms":[{"k":[1,0],"q":"3/4"},{"k":[0,0],"q":"-1"}]}"#;
        let f: SymbolicHFunction = serde_json::from_str(text).unwrap();
        assert_eq!(f.poly.coeff(&[1, 0].into()), ratio(3, 4));
        assert_eq!(f.decay, ratio(1, 2));
        let back = serde_json::to_string(&f).unwrap();
        assert_eq!(
            back,
            r#"{"mu":["1/2","0"],"decay":"1/2","terms":[{"k":[0,0],"q":"-1"},{"k":[1,0],"q":"3/4"}]}"#
        );
        let bad = r#"{"mu":["1/2"],"decay":"0","terms":[],"extra":1}"#;
        assert!(serde_json::from_str::<SymbolicHFunction>(bad).is_err());
        let wrong_dim = r#"{"mu":["1/2"],"terms":[{"k":[1,0],"q":"1"}]}"#;
        assert!(serde_json::from_str::<SymbolicHFunction>(wrong_dim).is_err());
    }

    #[test]
    fn operator_json_and_validation() {
        let p: OperatorPoly =
            serde_json::from_str(r#"{"terms":[{"k":[1,0],"a":"1"},{"k":[0,1],"a":1}]}"#).unwrap();
        assert_eq!(p, OperatorPoly::linear_sum(2));
        assert_eq!(p.degree(), 1);
        assert!(OperatorPoly::new(1, [(MultiIndex::from([0]), int(0))]).is_err());
        assert!(serde_json::from_str::<OperatorPoly>(r#"{"terms":[]}"#).is_err());
    }
}
