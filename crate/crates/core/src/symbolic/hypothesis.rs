//! Sign and nonvanishing conditions on the symbol `P`.

use serde::Serialize;

use crate::multiindex::with_length;
use crate::rational;

use super::OperatorPoly;

/// Default number of simplex sample points for the grid double-check.
pub const SIMPLEX_GRID_POINTS: usize = 10_000;

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub pass: bool,
    pub reason: Option<String>,
    pub same_sign: bool,
    /// Exact decision: `P != 0` on `[0, inf)^n \ {0}`.
    pub orthant_nonvanishing: bool,
    /// Axis (1-based) on whose coordinate ray `P` vanishes, when the exact criterion fails.
    pub failing_axis: Option<usize>,
    /// Simplex-grid double-check of the orthant condition.
    pub orthant_grid_nonvanishing: bool,
    pub grid_points: usize,
    pub grid_min_abs: f64,
    /// Sampled check of `P != 0` on all of `R^n \ {0}` (reported, not required).
    pub full_space_nonvanishing: bool,
}

/// Checks that all coefficients share a sign and that `P` has no zero on the
/// closed positive orthant minus the origin.
///
/// With one sign, `P(x) = 0` for `x >= 0` iff every monomial in the support
/// vanishes at `x`; the worst points are the coordinate rays, so the exact test
/// is: a constant term, or for each axis a monomial living on that axis alone.
pub fn check_hypothesis(p: &OperatorPoly) -> HypothesisReport {
    check_hypothesis_with(p, SIMPLEX_GRID_POINTS)
}

pub fn check_hypothesis_with(p: &OperatorPoly, grid_points: usize) -> HypothesisReport {
    let n = p.dim();
    let signs: Vec<i32> = p.terms().map(|(_, a)| rational::sign(a)).collect();
    let same_sign = signs.iter().all(|&s| s == signs[0]);

    let has_constant = p.terms().any(|(a, _)| a.is_zero());
    let mut failing_axis = None;
    if !has_constant {
        for axis in 0..n {
            let pure = p
                .terms()
                .any(|(a, _)| a.get(axis) > 0 && (0..n).all(|j| j == axis || a.get(j) == 0));
            if !pure {
                failing_axis = Some(axis + 1);
                break;
            }
        }
    }
    let orthant_nonvanishing = failing_axis.is_none();

    let (grid_min_abs, used) = simplex_min_abs(p, grid_points);
    let orthant_grid_nonvanishing = grid_min_abs > 0.0;
    let full_space_nonvanishing = sphere_nonvanishing(p);

    let reason = if !same_sign {
        Some("coefficients of P do not all have the same sign".to_string())
    } else if let Some(axis) = failing_axis {
        Some(format!(
            "P vanishes on the positive x_{axis} axis: no constant term and no monomial in x_{axis} alone"
        ))
    } else if !orthant_grid_nonvanishing {
        Some("simplex grid found a zero of P".to_string())
    } else {
        None
    };

    HypothesisReport {
        pass: reason.is_none(),
        reason,
        same_sign,
        orthant_nonvanishing,
        failing_axis,
        orthant_grid_nonvanishing,
        grid_points: used,
        grid_min_abs,
        full_space_nonvanishing,
    }
}

/// Minimum `|P|` over the lattice `{x >= 0, sum x = 1, N x integral}` with the
/// largest `N` whose lattice has at most `budget` points (vertices always included).
fn simplex_min_abs(p: &OperatorPoly, budget: usize) -> (f64, usize) {
    let n = p.dim();
    let count = |m: u32| -> usize {
        // C(m + n - 1, n - 1)
        let mut c: f64 = 1.0;
        for i in 0..(n - 1) {
            c = c * (m as f64 + 1.0 + i as f64) / (i as f64 + 1.0);
        }
        c as usize
    };
    let mut m: u32 = 1;
    if n > 1 {
        while count(m + 1) <= budget.max(n) {
            m += 1;
        }
    }
    let mut min_abs = f64::INFINITY;
    let mut used = 0;
    for k in with_length(n, m) {
        let x: Vec<f64> = k.entries().iter().map(|&v| v as f64 / m as f64).collect();
        min_abs = min_abs.min(p.eval(&x).abs());
        used += 1;
    }
    (min_abs, used)
}

/// Samples the unit sphere of `R^n` and reports whether `P` keeps a strict sign.
fn sphere_nonvanishing(p: &OperatorPoly) -> bool {
    let n = p.dim();
    let mut samples: Vec<Vec<f64>> = Vec::new();
    match n {
        1 => {
            samples.push(vec![1.0]);
            samples.push(vec![-1.0]);
        }
        2 => {
            for i in 0..3600 {
                let t = i as f64 * std::f64::consts::TAU / 3600.0;
                samples.push(vec![t.cos(), t.sin()]);
            }
        }
        _ => {
            // signed lattice directions, normalised
            let m = 6i32;
            let mut idx = vec![-m; n];
            loop {
                if idx.iter().any(|&v| v != 0) {
                    let norm = idx.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
                    samples.push(idx.iter().map(|&v| v as f64 / norm).collect());
                }
                let mut i = 0;
                while i < n {
                    idx[i] += 1;
                    if idx[i] <= m {
                        break;
                    }
                    idx[i] = -m;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
    }
    let mut pos = false;
    let mut neg = false;
    for x in &samples {
        let v = p.eval(x);
        if v.abs() < 1e-12 {
            return false;
        }
        if v > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
    }
    !(pos && neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::rational::int;

    fn poly(terms: &[(&[u32], i64)]) -> OperatorPoly {
        let n = terms[0].0.len();
        OperatorPoly::new(
            n,
            terms.iter().map(|(k, a)| (MultiIndex::new(k.to_vec()), int(*a))),
        )
        .unwrap()
    }

    #[test]
    fn positive_constant_passes() {
        let r = check_hypothesis(&poly(&[(&[0, 0], 1), (&[2, 0], 1)]));
        assert!(r.pass);
        assert!(r.full_space_nonvanishing);
    }

    #[test]
    fn linear_sum_passes_on_orthant_only() {
        let r = check_hypothesis(&OperatorPoly::linear_sum(2));
        assert!(r.pass, "{r:?}");
        assert!(r.orthant_grid_nonvanishing);
        assert!(r.grid_points > 9_000 && r.grid_points <= 10_000);
        // x1 + x2 vanishes at (1, -1)
        assert!(!r.full_space_nonvanishing);
    }

    #[test]
    fn product_fails_naming_axis() {
        let r = check_hypothesis(&poly(&[(&[1, 1], 1)]));
        assert!(!r.pass);
        assert_eq!(r.failing_axis, Some(1));
        assert!(!r.orthant_grid_nonvanishing);
        assert!(r.reason.unwrap().contains("x_1"));
    }

    #[test]
    fn mixed_signs_fail() {
        let r = check_hypothesis(&poly(&[(&[0], 1), (&[1], -1)]));
        assert!(!r.pass);
        assert!(!r.same_sign);
    }

    #[test]
    fn exact_and_grid_agree_in_three_dimensions() {
        let ok = check_hypothesis(&poly(&[(&[1, 0, 0], 2), (&[0, 3, 0], 1), (&[0, 0, 1], 5), (&[1, 1, 1], 1)]));
        assert!(ok.pass && ok.orthant_grid_nonvanishing);
        let bad = check_hypothesis(&poly(&[(&[1, 0, 0], 2), (&[0, 1, 1], 1)]));
        assert!(!bad.pass && !bad.orthant_grid_nonvanishing);
        assert_eq!(bad.failing_axis, Some(2));
    }
}
