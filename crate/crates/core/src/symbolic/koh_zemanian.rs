//! Normal-ordered expansion `x^(-mu-1/2) S^k = sum_l b_{l,k} x^(2l) T^(k+l)` on u-parts.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::multiindex::MultiIndex;
use crate::rational::{self, Rational};
use crate::special::MuVector;

use super::{apply_tk, EvenPolynomial, UForm};

/// Single-axis coefficients `l -> b_{l,k}` for order `mu_i`.
///
/// Expands `(x^2 T^2 + beta T)^k`, `beta = 2(mu_i + 1)`, left-multiplying one
/// factor at a time and normal-ordering with `[T, x^(2l)] = 2l x^(2l-2)`:
///
/// `x^2 T^2 . x^(2l) T^m = x^(2l+2) T^(m+2) + 4l x^(2l) T^(m+1) + 4l(l-1) x^(2l-2) T^m`
/// `beta T . x^(2l) T^m  = beta x^(2l) T^(m+1) + 2l beta x^(2l-2) T^m`
pub fn koh_zemanian_coeffs(k: u32, mu_i: &Rational) -> BTreeMap<u32, Rational> {
    let beta = (mu_i + Rational::one()) * rational::int(2);
    let mut cur: BTreeMap<u32, Rational> = BTreeMap::from([(0, Rational::one())]);
    for _ in 0..k {
        let mut next: BTreeMap<u32, Rational> = BTreeMap::new();
        for (&l, b) in &cur {
            let li = rational::int(l as i64);
            *next.entry(l + 1).or_insert_with(Rational::zero) += b;
            *next.entry(l).or_insert_with(Rational::zero) +=
                b * (&li * rational::int(4) + &beta);
            if l > 0 {
                let down = &li * rational::int(4) * (&li - Rational::one()) + &li * rational::int(2) * &beta;
                *next.entry(l - 1).or_insert_with(Rational::zero) += b * down;
            }
        }
        next.retain(|_, v| !v.is_zero());
        cur = next;
    }
    cur
}

/// Multi-axis coefficients `b_{l,k} = prod_i b_{l_i,k_i}(mu_i)`, for `l <= k`.
pub fn koh_zemanian_multi(k: &MultiIndex, mu: &MuVector) -> BTreeMap<MultiIndex, Rational> {
    let per_axis: Vec<BTreeMap<u32, Rational>> = (0..k.dim())
        .map(|i| koh_zemanian_coeffs(k.get(i), mu.order(i)))
        .collect();
    let mut out = BTreeMap::new();
    for l in k.below() {
        let mut b = Rational::one();
        for (i, table) in per_axis.iter().enumerate() {
            match table.get(&l.get(i)) {
                Some(v) => b *= v,
                None => {
                    b = Rational::zero();
                    break;
                }
            }
        }
        if !b.is_zero() {
            out.insert(l, b);
        }
    }
    out
}

/// `sum_l b_{l,k} x^(2l) T^(k+l) u`.
pub fn apply_koh_zemanian(k: &MultiIndex, mu: &MuVector, u: &UForm) -> UForm {
    let mut acc = EvenPolynomial::zero(u.dim());
    for (l, b) in koh_zemanian_multi(k, mu) {
        let image = apply_tk(&k.add(&l), u);
        acc = acc.add(&image.poly.shift(&l).scale(&b));
    }
    UForm::new(acc, u.decay.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::symbolic::apply_sk_u;

    #[test]
    fn first_coefficients() {
        let m = ratio(1, 3);
        assert_eq!(koh_zemanian_coeffs(0, &m), BTreeMap::from([(0, int(1))]));
        let k1 = koh_zemanian_coeffs(1, &m);
        assert_eq!(k1, BTreeMap::from([(0, (m.clone() + int(1)) * int(2)), (1, int(1))]));
    }

    #[test]
    fn expansion_matches_composed_s() {
        for m in [ratio(-1, 2), int(0), ratio(1, 2), int(2)] {
            let mu = MuVector::new(vec![m.clone()]).unwrap();
            for k in 0u32..=4 {
                for p in 0u32..=6 {
                    for c in [int(0), ratio(1, 2)] {
                        let u = UForm::new(EvenPolynomial::monomial([p].into(), int(1)), c.clone());
                        let k = MultiIndex::from([k]);
                        assert_eq!(
                            apply_koh_zemanian(&k, &mu, &u),
                            apply_sk_u(&k, &mu, &u),
                            "mu={m} k={k:?} p={p} c={c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn multi_axis_expansion() {
        let mu = MuVector::from_ratios(&[(0, 1), (3, 2)]).unwrap();
        let u = UForm::new(
            EvenPolynomial::from_terms(2, [([2, 1].into(), int(3)), ([0, 3].into(), ratio(-1, 2))]).unwrap(),
            ratio(1, 2),
        );
        for k in crate::multiindex::graded_enumerate(2, 3) {
            assert_eq!(apply_koh_zemanian(&k, &mu, &u), apply_sk_u(&k, &mu, &u));
        }
    }
}
