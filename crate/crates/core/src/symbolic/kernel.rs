//! Exact kernels of `L` on the polynomial solution family.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::Result;
use crate::multiindex::{graded_enumerate, MultiIndex};
use crate::rational::Rational;
use crate::special::MuVector;

use super::{apply_l, EvenPolynomial, OperatorPoly, SymbolicHFunction};

/// Dense matrix of `L` acting on `x^(mu+1/2) x^(2k)`, `|k| <= D`.
/// Column `j` holds the image of `monomials[j]`; rows use the same ordering.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    pub monomials: Vec<MultiIndex>,
    pub rows: Vec<Vec<Rational>>,
}

pub fn operator_matrix(l: &OperatorPoly, mu: &MuVector, max_degree: u32) -> Result<KernelMatrix> {
    let n = l.dim();
    mu.check_dim(n)?;
    let monomials = graded_enumerate(n, max_degree);
    let images: Vec<EvenPolynomial> = monomials
        .par_iter()
        .map(|k| {
            let f = SymbolicHFunction::new(
                mu.clone(),
                EvenPolynomial::monomial(k.clone(), Rational::one()),
                Rational::zero(),
            )?;
            Ok(apply_l(l, mu, &f)?.poly)
        })
        .collect::<Result<_>>()?;
    let rows = monomials
        .iter()
        .map(|row| images.iter().map(|img| img.coeff(row)).collect())
        .collect();
    Ok(KernelMatrix { monomials, rows })
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Nullspace vectors of a dense rational matrix.
pub(crate) fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); ncols];
            v[fc] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][fc].clone();
            }
            v
        })
        .collect()
}

/// Basis of `{ x^(mu+1/2) Q(x^2) : deg Q <= D, L f = 0 }`.
///
/// Each element is monic in its graded-lex leading monomial, no element
/// contains another's leading monomial, and elements are sorted by leading
/// monomial.
pub fn kernel_basis(l: &OperatorPoly, mu: &MuVector, max_degree: u32) -> Result<Vec<SymbolicHFunction>> {
    let matrix = operator_matrix(l, mu, max_degree)?;
    let ncols = matrix.monomials.len();
    let null = nullspace(&matrix.rows, ncols);
    if null.is_empty() {
        return Ok(Vec::new());
    }
    // reorder columns so the largest monomial comes first, then row-reduce
    let mut reversed: Vec<Vec<Rational>> = null
        .into_iter()
        .map(|v| v.into_iter().rev().collect())
        .collect();
    rref(&mut reversed, ncols);
    let mut basis: Vec<SymbolicHFunction> = reversed
        .into_iter()
        .filter(|v| v.iter().any(|q| !q.is_zero()))
        .map(|v| {
            let poly = EvenPolynomial::from_terms(
                l.dim(),
                v.into_iter()
                    .rev()
                    .zip(&matrix.monomials)
                    .map(|(q, k)| (k.clone(), q)),
            )?;
            SymbolicHFunction::new(mu.clone(), poly, Rational::zero())
        })
        .collect::<Result<_>>()?;
    basis.sort_by(|a, b| a.poly.leading().map(|t| t.0).cmp(&b.poly.leading().map(|t| t.0)));
    Ok(basis)
}
