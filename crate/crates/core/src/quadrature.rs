//! Composite Gauss-Legendre rules on `[0, X]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_POINTS: usize = 24;
pub const DEFAULT_PANELS: usize = 16;
/// Tail tolerance used to pick truncation radii.
pub const DEFAULT_TAIL: f64 = 1e-14;
/// Upper bound on nodes per axis.
pub const MAX_NODES: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub radius: f64,
    pub panels: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn build_quadrature(radius: f64, points_per_panel: usize, panels: usize) -> Result<QuadratureRule> {
    build_quadrature_capped(radius, points_per_panel, panels, MAX_NODES)
}

pub fn build_quadrature_capped(
    radius: f64,
    points_per_panel: usize,
    panels: usize,
    cap: usize,
) -> Result<QuadratureRule> {
    if !(radius > 0.0) || !radius.is_finite() || points_per_panel == 0 || panels == 0 {
        return Err(Error::Domain(format!(
            "quadrature needs positive radius, points and panels (got {radius}, {points_per_panel}, {panels})"
        )));
    }
    let total = points_per_panel.saturating_mul(panels);
    if total > cap {
        return Err(Error::LimitExceeded(format!(
            "{total} quadrature nodes exceed the cap of {cap}"
        )));
    }
    let (x, w) = gauss_legendre(points_per_panel);
    let h = radius / panels as f64;
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(a + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        radius,
        panels,
    })
}

/// `X = c^(-1/2) sqrt(2 ln(1/tail))`, so `exp(-c X^2) = tail^2`; the square leaves
/// room for polynomial prefactors.
pub fn truncation_radius(decay: f64, tail: f64) -> f64 {
    (2.0 * (1.0 / tail).ln() / decay).sqrt()
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Default rule for a Gaussian of rate `decay`.
    pub fn for_decay(decay: f64) -> Result<QuadratureRule> {
        build_quadrature(truncation_radius(decay, DEFAULT_TAIL), DEFAULT_POINTS, DEFAULT_PANELS)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}
