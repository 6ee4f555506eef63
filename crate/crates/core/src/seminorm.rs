//! Seminorms `gamma_{m,k}`, `lambda_{m,k}` and `rho_R` of the closed family.
//!
//! Suprema are taken over a geometric tensor grid together with the exact
//! value at the origin; an optional golden-section pass refines the best grid
//! point coordinate by coordinate.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel::GridSpec;
use crate::multiindex::{graded_enumerate, MultiIndex};
use crate::quadrature::{truncation_radius, DEFAULT_TAIL};
use crate::rational;
use crate::special::MuVector;
use crate::symbolic::{apply_sk_u, apply_tk, SymbolicHFunction, UForm};

pub const SUP_GRID_LO: f64 = 1e-3;
pub const SUP_GRID_POINTS: usize = 200;

#[derive(Clone, Debug)]
pub struct SupOptions {
    pub grid: GridSpec,
    pub refine: bool,
}

impl SupOptions {
    /// Geometric grid `[1e-3, R]^n`, `R` the truncation radius of the Gaussian.
    /// Axes keep 200 points up to `n = 2` and shrink beyond so the grid stays small.
    pub fn for_function(phi: &SymbolicHFunction) -> Result<SupOptions> {
        let c = rational::to_f64(&phi.decay);
        if !(c > 0.0) {
            return Err(Error::DecayRequired);
        }
        let n = phi.dim();
        let per_axis = if n <= 2 {
            SUP_GRID_POINTS
        } else {
            (4.0e6f64.powf(1.0 / n as f64).floor() as usize).max(8)
        };
        Ok(SupOptions {
            grid: GridSpec::geometric(n, SUP_GRID_LO, truncation_radius(c, DEFAULT_TAIL), per_axis)?,
            refine: false,
        })
    }

    pub fn refined(mut self) -> Self {
        self.refine = true;
        self
    }
}

/// Location and value of a weighted supremum.
#[derive(Clone, Debug, Serialize)]
pub struct SupReport {
    pub value: f64,
    pub argmax: Option<Vec<f64>>,
}

/// `sup |(1 + |x|^2)^m u(x)|` over the grid and the origin.
pub fn weighted_sup(m: i32, u: &UForm, opts: &SupOptions) -> SupReport {
    let cu = u.compile();
    let g = |x: &[f64]| -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        ((1.0 + r2).powi(m) * cu.eval(x)).abs()
    };
    let origin = rational::to_f64(&u.value_at_origin()).abs();
    grid_sup(&g, &opts.grid, Some(origin), opts.refine)
}

/// `sup g` over `grid`, optionally including a known value at the origin and a
/// local refinement of the best grid point.
pub fn grid_sup(g: &(impl Fn(&[f64]) -> f64 + Sync), grid: &GridSpec, origin: Option<f64>, refine_best: bool) -> SupReport {
    let (best_i, best) = (0..grid.len())
        .into_par_iter()
        .map(|i| (i, g(&grid.point(i))))
        .reduce(|| (usize::MAX, f64::NEG_INFINITY), |a, b| {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        });
    let mut report = match origin {
        Some(o) if o >= best => SupReport {
            value: o,
            argmax: None,
        },
        _ => SupReport {
            value: best,
            argmax: Some(grid.point(best_i)),
        },
    };
    if refine_best {
        if let Some(x0) = report.argmax.clone() {
            let (x, v) = refine(g, grid, x0);
            if v > report.value {
                report = SupReport {
                    value: v,
                    argmax: Some(x),
                };
            }
        }
    }
    report
}

/// Coordinate-wise golden-section ascent inside the neighbouring grid cells.
fn refine(g: &impl Fn(&[f64]) -> f64, grid: &GridSpec, mut x: Vec<f64>) -> (Vec<f64>, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    for _sweep in 0..3 {
        for i in 0..x.len() {
            let axis = &grid.axes()[i];
            let pos = axis.partition_point(|&v| v < x[i]);
            let lo = if pos == 0 { axis[0] * 0.5 } else { axis[pos - 1] };
            let hi = if pos + 1 >= axis.len() { axis[axis.len() - 1] } else { axis[pos + 1] };
            let at = |t: f64, x: &mut Vec<f64>| {
                let old = x[i];
                x[i] = t;
                let v = g(x);
                x[i] = old;
                v
            };
            let (mut a, mut b) = (lo, hi);
            let mut c = b - INV_PHI * (b - a);
            let mut d = a + INV_PHI * (b - a);
            let mut fc = at(c, &mut x);
            let mut fd = at(d, &mut x);
            for _ in 0..60 {
                if fc > fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - INV_PHI * (b - a);
                    fc = at(c, &mut x);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + INV_PHI * (b - a);
                    fd = at(d, &mut x);
                }
            }
            let t = 0.5 * (a + b);
            if at(t, &mut x) > g(&x) {
                x[i] = t;
            }
        }
    }
    let v = g(&x);
    (x, v)
}

fn check(phi: &SymbolicHFunction, mu: &MuVector, k: &MultiIndex) -> Result<()> {
    if phi.decay.is_zero() {
        return Err(Error::DecayRequired);
    }
    if phi.mu != *mu {
        return Err(Error::Domain("seminorm order differs from the function's mu".into()));
    }
    mu.check_dim(k.dim())
}

/// `gamma_{m,k}(phi) = sup |(1 + |x|^2)^m T^k u|`.
pub fn seminorm_gamma(m: u32, k: &MultiIndex, mu: &MuVector, phi: &SymbolicHFunction, opts: &SupOptions) -> Result<f64> {
    check(phi, mu, k)?;
    Ok(weighted_sup(m as i32, &apply_tk(k, &phi.u_part()), opts).value)
}

/// `lambda_{m,k}(phi) = sup |(1 + |x|^2)^m x^(-mu-1/2) S^k phi|`.
pub fn seminorm_lambda(m: u32, k: &MultiIndex, mu: &MuVector, phi: &SymbolicHFunction, opts: &SupOptions) -> Result<f64> {
    check(phi, mu, k)?;
    Ok(weighted_sup(m as i32, &apply_sk_u(k, mu, &phi.u_part()), opts).value)
}

/// `rho_R(phi) = sum_{m <= R, |k| <= R} lambda_{m,k}(phi)`.
pub fn seminorm_rho(r: u32, mu: &MuVector, phi: &SymbolicHFunction, opts: &SupOptions) -> Result<f64> {
    let mut total = 0.0;
    for m in 0..=r {
        for k in graded_enumerate(phi.dim(), r) {
            total += seminorm_lambda(m, &k, mu, phi, opts)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::symbolic::{koh_zemanian_coeffs, EvenPolynomial};

    fn gauss(mu: (i64, i64)) -> SymbolicHFunction {
        SymbolicHFunction::gaussian(MuVector::from_ratios(&[mu]).unwrap(), ratio(1, 2))
    }

    #[test]
    fn gamma_examples() {
        let phi = gauss((1, 2));
        let opts = SupOptions::for_function(&phi).unwrap();
        let z = MultiIndex::zero(1);
        assert_eq!(seminorm_gamma(0, &z, &phi.mu, &phi, &opts).unwrap(), 1.0);
        let g1 = seminorm_gamma(1, &z, &phi.mu, &phi, &opts.clone().refined()).unwrap();
        assert!((g1 - 2.0 * (-0.5f64).exp()).abs() < 1e-12, "{g1}");
        let coarse = seminorm_gamma(1, &z, &phi.mu, &phi, &opts).unwrap();
        assert!((coarse - 2.0 * (-0.5f64).exp()).abs() < 1e-4);
        assert_eq!(seminorm_gamma(0, &MultiIndex::from([1]), &phi.mu, &phi, &opts).unwrap(), 1.0);
    }

    #[test]
    fn lambda_examples() {
        let phi = gauss((1, 2));
        let opts = SupOptions::for_function(&phi).unwrap();
        let z = MultiIndex::zero(1);
        assert_eq!(
            seminorm_lambda(2, &z, &phi.mu, &phi, &opts).unwrap(),
            seminorm_gamma(2, &z, &phi.mu, &phi, &opts).unwrap()
        );
        let l = seminorm_lambda(0, &MultiIndex::from([1]), &phi.mu, &phi, &opts).unwrap();
        assert_eq!(l, 3.0);
    }

    #[test]
    fn lambda_bounded_by_gamma_sum() {
        let mu = MuVector::from_ratios(&[(0, 1)]).unwrap();
        let poly = EvenPolynomial::from_terms(1, [([0].into(), ratio(1, 1)), ([2].into(), ratio(-3, 2))]).unwrap();
        let phi = SymbolicHFunction::new(mu.clone(), poly, ratio(1, 3)).unwrap();
        let opts = SupOptions::for_function(&phi).unwrap();
        for k in 0..=2u32 {
            for m in 0..=2u32 {
                let lam = seminorm_lambda(m, &MultiIndex::from([k]), &mu, &phi, &opts).unwrap();
                let bound: f64 = koh_zemanian_coeffs(k, mu.order(0))
                    .iter()
                    .map(|(l, b)| {
                        rational::to_f64(b).abs()
                            * seminorm_gamma(m + l, &MultiIndex::from([k + l]), &mu, &phi, &opts).unwrap()
                    })
                    .sum();
                assert!(lam <= bound * (1.0 + 1e-12), "m={m} k={k}: {lam} > {bound}");
            }
        }
    }

    #[test]
    fn rho_is_sum_and_monotone() {
        let phi = gauss((1, 2));
        let opts = SupOptions::for_function(&phi).unwrap();
        let mu = phi.mu.clone();
        let r0 = seminorm_rho(0, &mu, &phi, &opts).unwrap();
        assert_eq!(r0, seminorm_lambda(0, &MultiIndex::zero(1), &mu, &phi, &opts).unwrap());
        let r1 = seminorm_rho(1, &mu, &phi, &opts).unwrap();
        let terms: f64 = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(m, k)| seminorm_lambda(m, &MultiIndex::from([k]), &mu, &phi, &opts).unwrap())
            .sum();
        assert_eq!(r1, terms);
        let r2 = seminorm_rho(2, &mu, &phi, &opts).unwrap();
        assert!(r0 <= r1 && r1 <= r2);
    }

    #[test]
    fn decay_required() {
        let mu = MuVector::from_ratios(&[(1, 2)]).unwrap();
        let phi = SymbolicHFunction::gaussian(mu.clone(), ratio(0, 1));
        assert!(matches!(SupOptions::for_function(&phi), Err(Error::DecayRequired)));
        let opts = SupOptions::for_function(&gauss((1, 2))).unwrap();
        assert!(matches!(
            seminorm_gamma(0, &MultiIndex::zero(1), &mu, &phi, &opts),
            Err(Error::DecayRequired)
        ));
    }
}
