//! Numerical membership checks for the multiplier space: each `T^k theta` bounded
//! by a power of `1 + |x|^2`.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::GridSpec;
use crate::multiindex::{graded_enumerate, MultiIndex};
use crate::rational::{self, Rational};
use crate::seminorm::{grid_sup, SUP_GRID_LO, SUP_GRID_POINTS};
use crate::symbolic::{apply_t, EvenPolynomial, UForm};

use super::cutoff::{CutoffSpec, Window};

pub const N_RANGE: i32 = 20;
/// Radii used to read off the growth exponent of `T^k theta`.
pub const GROWTH_RADII: (f64, f64) = (1e2, 1e3);
/// Outer edge of the sup grid for purely rational multipliers.
pub const RATIONAL_GRID_RADIUS: f64 = 1e2;

/// `theta(x) = P(x^2) / Q(x^2)`, optionally times a radial cutoff.
/// Both polynomials are written in the squared variables `X_i = x_i^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Multiplier {
    #[serde(with = "crate::symbolic::poly_serde")]
    pub num: EvenPolynomial,
    #[serde(with = "crate::symbolic::poly_serde")]
    pub den: EvenPolynomial,
    #[serde(default)]
    pub cutoff: Option<CutoffSpec>,
}

/// `N / Q^p`.
#[derive(Clone, Debug)]
struct Quotient {
    num: EvenPolynomial,
    power: u32,
}

fn t_poly(axis: usize, p: &EvenPolynomial) -> EvenPolynomial {
    apply_t(axis, &UForm::polynomial(p.clone())).poly
}

impl Multiplier {
    pub fn rational(num: EvenPolynomial, den: EvenPolynomial) -> Result<Self> {
        let m = Multiplier { num, den, cutoff: None };
        m.validate()?;
        Ok(m)
    }

    pub fn with_cutoff(num: EvenPolynomial, den: EvenPolynomial, cutoff: CutoffSpec) -> Result<Self> {
        let m = Multiplier {
            num,
            den,
            cutoff: Some(cutoff),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    /// The denominator must have a nonzero constant term and one-signed
    /// coefficients, so it is bounded away from 0 on the closed orthant.
    pub fn validate(&self) -> Result<()> {
        if self.num.dim() != self.den.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.num.dim(),
                got: self.den.dim(),
            });
        }
        let b0 = self.den.constant_term();
        if b0.is_zero() {
            return Err(Error::HypothesisFailed(
                "denominator has no constant term, so it vanishes at the origin".into(),
            ));
        }
        if self.den.terms().any(|(_, q)| q.signum() != b0.signum()) {
            return Err(Error::HypothesisFailed(
                "denominator coefficients do not all have the same sign".into(),
            ));
        }
        Ok(())
    }

    /// `T^j (P/Q)` for every `j <= k`, as quotients over powers of `Q`.
    fn quotients(&self, k: &MultiIndex) -> Vec<(MultiIndex, Quotient)> {
        let n = self.dim();
        let mut out: Vec<(MultiIndex, Quotient)> = vec![(
            MultiIndex::zero(n),
            Quotient {
                num: self.num.clone(),
                power: 1,
            },
        )];
        for j in k.below().into_iter().skip(1) {
            // derive from a predecessor j - e_i
            let axis = (0..n).find(|&i| j.get(i) > 0).expect("j nonzero");
            let prev = j.with(axis, j.get(axis) - 1);
            let q = &out.iter().find(|(m, _)| *m == prev).expect("graded order").1;
            // T(N / Q^p) = (T N * Q - p N T Q) / Q^(p+1)
            let p = rational::int(q.power as i64);
            let num = t_poly(axis, &q.num)
                .mul(&self.den)
                .sub(&q.num.mul(&t_poly(axis, &self.den)).scale(&p));
            out.push((
                j,
                Quotient {
                    num,
                    power: q.power + 1,
                },
            ));
        }
        out
    }

    /// Compiled evaluator of `T^k theta`.
    pub fn derivative(&self, k: &MultiIndex) -> MultiplierDerivative {
        let quotients = self
            .quotients(k)
            .into_iter()
            .map(|(j, q)| (j, q.num.compile(), q.power as i32))
            .collect();
        MultiplierDerivative {
            k: k.clone(),
            den: self.den.compile(),
            quotients,
            window: self.cutoff.clone().map(Window::Inner),
        }
    }
}

pub struct MultiplierDerivative {
    k: MultiIndex,
    den: crate::symbolic::CompiledPoly,
    quotients: Vec<(MultiIndex, crate::symbolic::CompiledPoly, i32)>,
    window: Option<Window>,
}

impl MultiplierDerivative {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let q = self.den.eval(x);
        let rational = |j: &MultiIndex| -> f64 {
            let (_, num, p) = self.quotients.iter().find(|(m, _, _)| m == j).expect("j <= k");
            num.eval(x) / q.powi(*p)
        };
        match &self.window {
            None => rational(&self.k),
            Some(w) => {
                let wd = w.t_derivatives(x, self.k.length() as usize);
                if wd.iter().all(|&v| v == 0.0) {
                    return 0.0;
                }
                let mut sum = 0.0;
                for j in self.k.below() {
                    let rest = self.k.checked_sub(&j).expect("j <= k");
                    let b = self.k.binomial(&j).expect("j <= k").to_f64().unwrap_or(f64::INFINITY);
                    sum += b * wd[rest.length() as usize] * rational(&j);
                }
                sum
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct MultiplierOptions {
    pub points_per_axis: usize,
    pub refine: bool,
}

impl Default for MultiplierOptions {
    fn default() -> Self {
        MultiplierOptions {
            points_per_axis: SUP_GRID_POINTS,
            refine: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplierEntry {
    pub k: MultiIndex,
    /// Exponent reported for the bound `|(1 + |x|^2)^n_k T^k theta| < C`.
    pub n_k: i32,
    /// Largest exponent in `[-20, 20]` for which the weighted function stays bounded.
    pub n_max: i32,
    /// Observed growth rate `g` with `|T^k theta| ~ (1 + |x|^2)^g`.
    pub growth: f64,
    pub bound: f64,
    pub argmax: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplierReport {
    pub entries: Vec<MultiplierEntry>,
}

impl MultiplierReport {
    pub fn entry(&self, k: &MultiIndex) -> Option<&MultiplierEntry> {
        self.entries.iter().find(|e| e.k == *k)
    }
}

fn directions(n: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0]],
        _ => {
            let m = if n == 2 { 64 } else { 8 };
            let mut out = Vec::new();
            for k in crate::multiindex::with_length(n, m) {
                let v: Vec<f64> = k.entries().iter().map(|&e| e as f64).collect();
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                out.push(v.iter().map(|a| a / norm).collect());
            }
            out
        }
    }
}

/// For each `|k| <= max_order`: `n_max` from the growth of `T^k theta` between two
/// large radii, `n_k = min(0, n_max)`, and `C = sup |(1 + |x|^2)^n_k T^k theta|`
/// over a geometric grid plus the origin.
pub fn multiplier_check(theta: &Multiplier, max_order: u32, opts: &MultiplierOptions) -> Result<MultiplierReport> {
    theta.validate()?;
    let n = theta.dim();
    let outer = match &theta.cutoff {
        Some(c) => 1.5 * c.outer,
        None => RATIONAL_GRID_RADIUS,
    };
    let per_axis = if n <= 2 {
        opts.points_per_axis
    } else {
        ((opts.points_per_axis as f64).powf(2.0 / n as f64) as usize).max(8)
    };
    let grid = GridSpec::geometric(n, SUP_GRID_LO, outer, per_axis)?;
    let dirs = directions(n);
    let mut entries = Vec::new();
    for k in graded_enumerate(n, max_order) {
        let d = theta.derivative(&k);
        let (r1, r2) = GROWTH_RADII;
        let sphere_max = |r: f64| {
            dirs.iter()
                .map(|u| {
                    let x: Vec<f64> = u.iter().map(|a| a * r).collect();
                    d.eval(&x).abs()
                })
                .fold(0.0, f64::max)
        };
        let (m1, m2) = (sphere_max(r1), sphere_max(r2));
        let (growth, n_max) = if m2 == 0.0 || theta.cutoff.is_some() {
            (f64::NEG_INFINITY, N_RANGE)
        } else {
            let g = (m2 / m1).ln() / ((1.0 + r2 * r2) / (1.0 + r1 * r1)).ln();
            let gr = g.round();
            let g_int = if (g - gr).abs() < 0.05 { gr } else { g };
            let n_max = (-g_int).floor().clamp(-(N_RANGE as f64), N_RANGE as f64) as i32;
            (g, n_max)
        };
        let n_k = n_max.min(0);
        let weighted = |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            ((1.0 + r2).powi(n_k) * d.eval(x)).abs()
        };
        let origin = d.eval(&vec![0.0; n]).abs();
        let sup = grid_sup(&weighted, &grid, Some(origin), opts.refine);
        entries.push(MultiplierEntry {
            k,
            n_k,
            n_max,
            growth,
            bound: sup.value,
            argmax: sup.argmax,
        });
    }
    Ok(MultiplierReport { entries })
}

/// Exact `T^k (P/Q)` at the origin, `Q(0) != 0`.
pub fn derivative_at_origin(theta: &Multiplier, k: &MultiIndex) -> Rational {
    let q = theta.quotients(k);
    let (_, last) = q.iter().find(|(j, _)| j == k).expect("k present");
    let b0 = theta.den.constant_term();
    let mut d = Rational::from_integer(1.into());
    for _ in 0..last.power {
        d *= &b0;
    }
    last.num.constant_term() / d
}
