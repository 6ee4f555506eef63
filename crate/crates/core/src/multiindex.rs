//! Multi-indices `k = (k1, ..., kn)` and the combinatorics built on them.
//!
//! The `Ord` impl is graded-lexicographic (total length first, then
//! lexicographic on the entries). Every ordered collection in the crate
//! relies on it, so JSON output and kernel matrices are deterministic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs at least one entry");
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    /// The canonical basis vector `e_axis` in dimension `n`.
    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// `|k| = k1 + ... + kn`.
    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// `k! = k1! ... kn!`, exact.
    pub fn factorial(&self) -> BigUint {
        self.0.iter().map(|&v| factorial(v)).product()
    }

    /// Componentwise binomial `C(k, j) = C(k1, j1) ... C(kn, jn)`.
    pub fn binomial(&self, j: &MultiIndex) -> Result<BigUint> {
        self.check_dim(j)?;
        let mut acc = BigUint::one();
        for (axis, (&k, &jj)) in self.0.iter().zip(&j.0).enumerate() {
            if jj > k {
                return Err(Error::ComponentExceeds {
                    axis,
                    sub: j.0.clone(),
                    sup: self.0.clone(),
                });
            }
            acc *= binomial(k, jj);
        }
        Ok(acc)
    }

    /// `j <= k` componentwise.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.le(self) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Componentwise sum; panics on dimension mismatch.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn with(&self, axis: usize, value: u32) -> MultiIndex {
        let mut v = self.0.clone();
        v[axis] = value;
        MultiIndex(v)
    }

    /// All `j` with `0 <= j <= k` componentwise, graded-lex ordered.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.dim())];
        for axis in 0..self.dim() {
            let mut next = Vec::with_capacity(out.len() * (self.0[axis] as usize + 1));
            for base in &out {
                for v in 0..=self.0[axis] {
                    next.push(base.with(axis, v));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    pub(crate) fn check_dim(&self, other: &MultiIndex) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length()
            .cmp(&other.length())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex::new(v.to_vec())
    }
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// All multi-indices in dimension `n` with `|k| <= max_len`, graded-lex.
pub fn graded_enumerate(n: usize, max_len: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        out.extend(with_length(n, len));
    }
    out
}

/// All multi-indices in dimension `n` with `|k| == len`, lexicographic.
pub fn with_length(n: usize, len: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == n {
            prefix.push(remaining);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in 0..=remaining {
            prefix.push(v);
            rec(n, remaining - v, prefix, out);
            prefix.pop();
        }
    }
    assert!(n >= 1);
    let mut out = Vec::new();
    rec(n, len, &mut Vec::with_capacity(n), &mut out);
    out
}
