use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::rational::{self, Rational};
use crate::special::MuVector;

use super::{EvenPolynomial, OperatorPoly, SymbolicHFunction, UForm};

/// `T_i = x_i^-1 d/dx_i` on a u-form, using
/// `T_i (x_i^(2p) e^(-c x^2)) = (2p x_i^(2p-2) - 2c x_i^(2p)) e^(-c x^2)`.
pub fn apply_t(axis: usize, u: &UForm) -> UForm {
    assert!(axis < u.dim(), "axis out of range");
    let two_c = &u.decay * rational::int(2);
    let mut out = EvenPolynomial::zero(u.dim());
    for (k, q) in u.poly.terms() {
        let p = k.get(axis);
        if p > 0 {
            out.add_term(k.with(axis, p - 1), q * rational::int(2 * p as i64));
        }
        if !two_c.is_zero() {
            out.add_term(k.clone(), -(q * &two_c));
        }
    }
    UForm::new(out, u.decay.clone())
}

/// `T^k = T_n^(k_n) o ... o T_1^(k_1)`.
pub fn apply_tk(k: &MultiIndex, u: &UForm) -> UForm {
    assert_eq!(k.dim(), u.dim(), "dimension mismatch");
    let mut cur = u.clone();
    for axis in 0..k.dim() {
        for _ in 0..k.get(axis) {
            if cur.is_zero() {
                return cur;
            }
            cur = apply_t(axis, &cur);
        }
    }
    cur
}

/// The conjugated Bessel operator on a u-part:
/// `x^(-mu_i-1/2) S_mu_i x^(mu_i+1/2) = x_i^2 T_i^2 + 2(mu_i + 1) T_i`.
pub fn apply_s_u(axis: usize, mu_i: &Rational, u: &UForm) -> UForm {
    let t1 = apply_t(axis, u);
    let t2 = apply_t(axis, &t1);
    let shifted = t2.poly.shift(&MultiIndex::unit(u.dim(), axis));
    let beta = (mu_i + Rational::one()) * rational::int(2);
    UForm::new(shifted.add(&t1.poly.scale(&beta)), u.decay.clone())
}

/// `S^k` on a u-part, axis 1 first.
pub fn apply_sk_u(k: &MultiIndex, mu: &MuVector, u: &UForm) -> UForm {
    let mut cur = u.clone();
    for axis in 0..k.dim() {
        for _ in 0..k.get(axis) {
            if cur.is_zero() {
                return cur;
            }
            cur = apply_s_u(axis, mu.order(axis), &cur);
        }
    }
    cur
}

/// `S_mu_i f`, staying inside the family.
pub fn apply_s(axis: usize, f: &SymbolicHFunction) -> SymbolicHFunction {
    f.with_u(apply_s_u(axis, f.mu.order(axis), &f.u_part()))
}

pub fn apply_sk(k: &MultiIndex, f: &SymbolicHFunction) -> SymbolicHFunction {
    f.with_u(apply_sk_u(k, &f.mu, &f.u_part()))
}

/// `L f = sum_alpha (-1)^|alpha| a_alpha S^alpha f`.
pub fn apply_l(l: &OperatorPoly, mu: &MuVector, f: &SymbolicHFunction) -> Result<SymbolicHFunction> {
    if l.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            got: f.dim(),
        });
    }
    mu.check_dim(f.dim())?;
    if *mu != f.mu {
        return Err(Error::Domain(
            "operator orders differ from the function's mu".into(),
        ));
    }
    let u = f.u_part();
    let mut acc = EvenPolynomial::zero(f.dim());
    for (alpha, a) in l.terms() {
        let image = apply_sk_u(alpha, mu, &u);
        let signed = if alpha.length() % 2 == 0 { a.clone() } else { -a.clone() };
        acc = acc.add(&image.poly.scale(&signed));
    }
    Ok(f.with_u(UForm::new(acc, f.decay.clone())))
}

/// Right-hand side of the Leibniz rule
/// `T^k (theta phi) = sum_{j <= k} C(k, j) T^(k-j) theta T^j phi`.
pub fn leibniz_tk(k: &MultiIndex, theta: &UForm, phi: &UForm) -> UForm {
    let decay = &theta.decay + &phi.decay;
    let mut acc = EvenPolynomial::zero(theta.dim());
    for j in k.below() {
        let rest = k.checked_sub(&j).expect("j <= k");
        let binom = Rational::from_integer(k.binomial(&j).expect("j <= k").into());
        let term = apply_tk(&rest, theta).mul(&apply_tk(&j, phi));
        acc = acc.add(&term.poly.scale(&binom));
    }
    UForm::new(acc, decay)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn mono(k: &[u32], q: i64) -> EvenPolynomial {
        EvenPolynomial::monomial(MultiIndex::new(k.to_vec()), int(q))
    }

    fn poly_u(p: EvenPolynomial) -> UForm {
        UForm::polynomial(p)
    }

    #[test]
    fn t_examples() {
        let u = poly_u(mono(&[2], 1));
        assert_eq!(apply_t(0, &u).poly, mono(&[1], 4));
        assert_eq!(apply_t(0, &apply_t(0, &u)).poly, mono(&[0], 8));
        let g = UForm::new(EvenPolynomial::one(1), ratio(1, 2));
        let tg = apply_t(0, &g);
        assert_eq!(tg.poly, mono(&[0], -1));
        assert_eq!(tg.decay, ratio(1, 2));
    }

    #[test]
    fn tk_monomial_cases() {
        // T^m x^(2k) with |m| = |k|: 2^|k| k! when m = k, else 0
        for k in crate::multiindex::graded_enumerate(3, 4) {
            let u = poly_u(EvenPolynomial::monomial(k.clone(), int(1)));
            for m in crate::multiindex::with_length(3, k.length()) {
                let got = apply_tk(&m, &u).poly;
                if m == k {
                    let want = Rational::from_integer(
                        (num_bigint::BigUint::from(2u32).pow(k.length()) * k.factorial()).into(),
                    );
                    assert_eq!(got, EvenPolynomial::constant(3, want));
                } else {
                    assert!(got.is_zero(), "m={m:?} k={k:?}");
                }
            }
        }
        assert_eq!(apply_tk(&[0, 0].into(), &poly_u(mono(&[1, 2], 3))).poly, mono(&[1, 2], 3));
    }

    #[test]
    fn single_axis_rule_without_factorial_typo() {
        // T^r x^(2p) = 2^r p!/(p-r)! x^(2(p-r)) for r <= p
        for p in 0u32..7 {
            for r in 0u32..=8 {
                let mut u = poly_u(mono(&[p], 1));
                for _ in 0..r {
                    u = apply_t(0, &u);
                }
                if r > p {
                    assert!(u.is_zero());
                } else {
                    let c: u64 = (p - r + 1..=p).map(u64::from).product::<u64>() << r;
                    assert_eq!(u.poly, mono(&[p - r], c as i64));
                }
            }
        }
    }

    #[test]
    fn s_examples() {
        let half = MuVector::from_ratios(&[(1, 2)]).unwrap();
        // f = x^3 = x^(1/2+1/2) x^2
        let f = SymbolicHFunction::new(half.clone(), mono(&[1], 1), int(0)).unwrap();
        let sf = apply_s(0, &f);
        assert_eq!(sf.poly, mono(&[0], 6));
        let f0 = SymbolicHFunction::new(half, EvenPolynomial::one(1), int(0)).unwrap();
        assert!(apply_s(0, &f0).is_zero());
        let zero = MuVector::from_ratios(&[(0, 1)]).unwrap();
        let g = SymbolicHFunction::new(zero, mono(&[1], 1), int(0)).unwrap();
        assert_eq!(apply_s(0, &g).poly, mono(&[0], 4));
    }

    #[test]
    fn s_monomial_rule_matches_second_difference() {
        let mu = MuVector::from_ratios(&[(-1, 2), (1, 3), (3, 2)]).unwrap();
        let pts = [
            [0.7, 1.3, 0.9],
            [1.1, 0.4, 1.6],
            [0.5, 0.8, 1.2],
            [1.9, 1.0, 0.6],
            [0.9, 1.7, 1.1],
            [1.4, 0.6, 0.8],
            [0.6, 1.5, 1.4],
            [1.2, 1.2, 0.5],
            [0.8, 0.9, 1.8],
            [1.6, 0.7, 1.0],
        ];
        for k in crate::multiindex::graded_enumerate(3, 3) {
            let f = SymbolicHFunction::new(mu.clone(), EvenPolynomial::monomial(k.clone(), int(1)), int(0))
                .unwrap();
            for axis in 0..3 {
                let sf = apply_s(axis, &f);
                let ki = k.get(axis) as i64;
                let want = &mu.order(axis).clone() + int(ki);
                let coeff = int(4 * ki) * want;
                if ki == 0 {
                    assert!(sf.is_zero());
                } else {
                    let mut k2 = k.clone();
                    k2 = k2.with(axis, k.get(axis) - 1);
                    assert_eq!(sf.poly, EvenPolynomial::monomial(k2, coeff));
                }
                let m = mu.order_f64(axis);
                let pot = (4.0 * m * m - 1.0) / 4.0;
                for x in &pts {
                    let h = 1e-4;
                    let mut xp = *x;
                    let mut xm = *x;
                    xp[axis] += h;
                    xm[axis] -= h;
                    let d2 = (f.eval(&xp).unwrap() - 2.0 * f.eval(x).unwrap() + f.eval(&xm).unwrap()) / (h * h);
                    let direct = d2 - pot / (x[axis] * x[axis]) * f.eval(x).unwrap();
                    let got = sf.eval(x).unwrap();
                    assert!(
                        (direct - got).abs() <= 1e-6 * got.abs().max(1.0),
                        "k={k:?} axis={axis} x={x:?}: {direct} vs {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn l_examples() {
        let mu = MuVector::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        let id = OperatorPoly::constant(2, int(1)).unwrap();
        let f = SymbolicHFunction::new(mu.clone(), mono(&[1, 0], 3), ratio(1, 2)).unwrap();
        assert_eq!(apply_l(&id, &mu, &f).unwrap(), f);
        let lap = OperatorPoly::linear_sum(2);
        let x1x2 = SymbolicHFunction::new(mu.clone(), EvenPolynomial::one(2), int(0)).unwrap();
        assert!(apply_l(&lap, &mu, &x1x2).unwrap().is_zero());
        let harmonic = SymbolicHFunction::new(mu.clone(), mono(&[1, 0], 1).sub(&mono(&[0, 1], 1)), int(0))
            .unwrap();
        assert!(apply_l(&lap, &mu, &harmonic).unwrap().is_zero());
        let one_d = OperatorPoly::linear_sum(1);
        assert!(matches!(
            apply_l(&one_d, &mu, &f),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn leibniz_examples() {
        let th = poly_u(mono(&[1], 1));
        let ph = poly_u(mono(&[2], 1));
        assert_eq!(leibniz_tk(&[0].into(), &th, &ph).poly, mono(&[3], 1));
        assert_eq!(leibniz_tk(&[1].into(), &th, &ph).poly, mono(&[2], 6));
        let a = poly_u(mono(&[1, 0], 1));
        let b = poly_u(mono(&[0, 1], 1));
        assert_eq!(leibniz_tk(&[1, 1].into(), &a, &b).poly, mono(&[0, 0], 4));
    }

    fn arb_uform(n: usize) -> impl Strategy<Value = UForm> {
        let term = (prop::collection::vec(0u32..4, n), -6i64..7, 1i64..4);
        (prop::collection::vec(term, 0..5), 0i64..3).prop_map(move |(terms, c)| {
            let p = EvenPolynomial::from_terms(
                n,
                terms.into_iter().map(|(k, a, b)| (MultiIndex::new(k), ratio(a, b))),
            )
            .unwrap();
            UForm::new(p, ratio(c, 2))
        })
    }

    proptest! {
        #[test]
        fn t_operators_commute(u in arb_uform(3), i in 0usize..3, j in 0usize..3) {
            prop_assert_eq!(apply_t(i, &apply_t(j, &u)), apply_t(j, &apply_t(i, &u)));
        }

        #[test]
        fn leibniz_is_exact(th in arb_uform(2), ph in arb_uform(2), k in prop::collection::vec(0u32..3, 2)) {
            let k = MultiIndex::new(k);
            let lhs = apply_tk(&k, &th.mul(&ph));
            let rhs = leibniz_tk(&k, &th, &ph);
            prop_assert_eq!(lhs.poly, rhs.poly);
        }
    }
}
