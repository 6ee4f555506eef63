//! Radial smooth cutoffs and truncated Taylor jets for their derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated Taylor series `sum_m c[m] t^m` about a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(v: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet(c)
    }

    /// The identity map `t -> t` expanded about `t0`.
    pub fn variable(t0: f64, order: usize) -> Jet {
        let mut j = Jet::constant(t0, order);
        if order > 0 {
            j.0[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }

    pub fn recip(&self) -> Jet {
        let n = self.0.len();
        let mut c = vec![0.0; n];
        c[0] = 1.0 / self.0[0];
        for m in 1..n {
            let s: f64 = (1..=m).map(|i| self.0[i] * c[m - i]).sum();
            c[m] = -s * c[0];
        }
        Jet(c)
    }

    pub fn exp(&self) -> Jet {
        // c' = a' c
        let n = self.0.len();
        let mut c = vec![0.0; n];
        c[0] = self.0[0].exp();
        for m in 1..n {
            let s: f64 = (1..=m).map(|i| i as f64 * self.0[i] * c[m - i]).sum();
            c[m] = s / m as f64;
        }
        Jet(c)
    }

    /// `d^m/dt^m` at the expansion point.
    pub fn derivative(&self, m: usize) -> f64 {
        let f: f64 = (1..=m).map(|i| i as f64).product();
        self.0.get(m).copied().unwrap_or(0.0) * f
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`, `f(t) / (f(t) + f(1-t))` between,
/// with `f(t) = exp(-1/t)`.
pub fn smooth_step(t: &Jet) -> Jet {
    let order = t.order();
    if t.0[0] <= 0.0 {
        return Jet::constant(0.0, order);
    }
    if t.0[0] >= 1.0 {
        return Jet::constant(1.0, order);
    }
    // f(t) / (f(t) + f(1-t)) = 1 / (1 + exp(1/t - 1/(1-t))), monotone under rounding
    let one_minus = Jet::constant(1.0, order).add(&t.scale(-1.0));
    let e = t.recip().add(&one_minus.recip().scale(-1.0));
    if e.0[0] > 700.0 {
        return Jet::constant(0.0, order);
    }
    if e.0[0] < -700.0 {
        return Jet::constant(1.0, order);
    }
    Jet::constant(1.0, order).add(&e.exp()).recip()
}

/// `psi(x) = Psi(|x|^2)`: 1 on `|x| <= inner`, 0 on `|x| >= outer`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
}

impl CutoffSpec {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::Domain(format!(
                "cutoff radii must satisfy 0 < inner < outer (got {inner}, {outer})"
            )));
        }
        Ok(CutoffSpec { inner, outer })
    }

    /// The paper's shape: 1 below `a/2`, 0 beyond `a`.
    pub fn from_radius(a: f64) -> Result<Self> {
        Self::new(a / 2.0, a)
    }

    /// Jet of `Psi` in `rho = |x|^2` about `rho0`, through `order` derivatives.
    pub fn profile_jet(&self, rho0: f64, order: usize) -> Jet {
        let (r0, r1) = (self.inner * self.inner, self.outer * self.outer);
        let t = Jet::variable(rho0, order).add(&Jet::constant(-r0, order)).scale(1.0 / (r1 - r0));
        let one_minus = Jet::constant(1.0, order).add(&t.scale(-1.0));
        smooth_step(&one_minus)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.profile_jet(x.iter().map(|v| v * v).sum(), 0).0[0]
    }
}

/// How a radial window multiplies a u-part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Window {
    None,
    /// `psi`: equal to 1 near the origin.
    Inner(CutoffSpec),
    /// `1 - psi`: vanishes on `|x| <= inner`.
    Outer(CutoffSpec),
}

impl Window {
    /// `T^j W` at `x` for every `|j| = m <= order`: since `W` depends on
    /// `rho = |x|^2` only, `T^j W = 2^|j| W^(|j|)(rho)`; entry `m` is that value.
    pub fn t_derivatives(&self, x: &[f64], order: usize) -> Vec<f64> {
        let rho: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Window::None => {
                let mut v = vec![0.0; order + 1];
                v[0] = 1.0;
                v
            }
            Window::Inner(c) | Window::Outer(c) => {
                let jet = c.profile_jet(rho, order);
                let sign = if matches!(self, Window::Outer(_)) { -1.0 } else { 1.0 };
                (0..=order)
                    .map(|m| {
                        let d = sign * jet.derivative(m) * 2f64.powi(m as i32);
                        if m == 0 && sign < 0.0 {
                            1.0 + d
                        } else {
                            d
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.t_derivatives(x, 0)[0]
    }

    /// Value of `W` on a neighbourhood of the origin.
    pub fn at_origin(&self) -> f64 {
        match self {
            Window::None | Window::Inner(_) => 1.0,
            Window::Outer(_) => 0.0,
        }
    }
}
