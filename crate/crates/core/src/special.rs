//! Gamma, real-order Bessel `J_nu`, and the normalising constants `C_mu`, `C_k^mu`.

use std::f64::consts::PI;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::rational::{self, Rational};

/// Default upper bound on Bessel arguments.
pub const Z_MAX_DEFAULT: f64 = 200.0;

/// Below this argument `J_nu` and `z^-nu J_nu` are summed from the ascending series.
const SERIES_CUTOFF: f64 = 2.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Orders `mu = (mu_1, ..., mu_n)`, each `>= -1/2`, held exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MuRepr", into = "MuRepr")]
pub struct MuVector {
    orders: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct MuRepr(#[serde(with = "rational::vec")] Vec<Rational>);

impl TryFrom<MuRepr> for MuVector {
    type Error = Error;
    fn try_from(r: MuRepr) -> Result<Self> {
        MuVector::new(r.0)
    }
}

impl From<MuVector> for MuRepr {
    fn from(m: MuVector) -> Self {
        MuRepr(m.orders)
    }
}

impl MuVector {
    pub fn new(orders: Vec<Rational>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::Domain("mu needs at least one order".into()));
        }
        let floor = rational::ratio(-1, 2);
        for (i, m) in orders.iter().enumerate() {
            if *m < floor {
                return Err(Error::Domain(format!(
                    "mu_{} = {} violates the constraint mu_i >= -1/2",
                    i + 1,
                    rational::format(m)
                )));
            }
        }
        Ok(MuVector { orders })
    }

    /// Builds from `(numerator, denominator)` pairs.
    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(n, d)| rational::ratio(n, d)).collect())
    }

    /// Same order on every axis.
    pub fn uniform(n: usize, order: Rational) -> Result<Self> {
        Self::new(vec![order; n])
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[Rational] {
        &self.orders
    }

    pub fn order(&self, axis: usize) -> &Rational {
        &self.orders[axis]
    }

    pub fn order_f64(&self, axis: usize) -> f64 {
        rational::to_f64(&self.orders[axis])
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.orders.iter().map(rational::to_f64).collect()
    }

    /// `mu + k`, the order vector shifted by a multi-index.
    pub fn shifted(&self, k: &MultiIndex) -> MuVector {
        MuVector {
            orders: self
                .orders
                .iter()
                .zip(k.entries())
                .map(|(m, &kk)| m + rational::int(kk as i64))
                .collect(),
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: n,
            });
        }
        Ok(())
    }
}

/// `Gamma(x)` for `x > 0` via a Lanczos approximation.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    if x > 171.0 {
        return Err(Error::Domain(format!("gamma overflows for x = {x}")));
    }
    if x < 0.5 {
        return Ok(lanczos(x + 1.0) / x);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // split the power to keep t^(x+1/2) e^-t in range for large x
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * a
}

fn check_bessel_args(nu: f64, z: f64, z_max: f64) -> Result<()> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(Error::Domain(format!("Bessel order must be >= -1/2, got {nu}")));
    }
    if !(z >= 0.0) || z > z_max {
        return Err(Error::Domain(format!(
            "Bessel argument {z} outside [0, {z_max}]"
        )));
    }
    Ok(())
}

/// `J_nu(z)` for `nu >= -1/2`, `0 <= z <= 200`.
pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    bessel_j_bounded(nu, z, Z_MAX_DEFAULT)
}

pub fn bessel_j_bounded(nu: f64, z: f64, z_max: f64) -> Result<f64> {
    check_bessel_args(nu, z, z_max)?;
    if z == 0.0 {
        return match nu {
            n if n == 0.0 => Ok(1.0),
            n if n > 0.0 => Ok(0.0),
            _ => Err(Error::Domain(format!("J_{nu}(0) is unbounded"))),
        };
    }
    if z < SERIES_CUTOFF {
        return Ok(reduced_series(nu, z)? * z.powf(nu));
    }
    Ok(steed(nu, z))
}

/// `z^-nu J_nu(z)`, finite at the origin where it equals `1 / (2^nu Gamma(nu + 1))`.
pub fn reduced_bessel(nu: f64, z: f64) -> Result<f64> {
    reduced_bessel_bounded(nu, z, Z_MAX_DEFAULT)
}

pub fn reduced_bessel_bounded(nu: f64, z: f64, z_max: f64) -> Result<f64> {
    check_bessel_args(nu, z, z_max)?;
    if z < SERIES_CUTOFF {
        return reduced_series(nu, z);
    }
    Ok(steed(nu, z) / z.powf(nu))
}

/// `sum_m (-z^2/4)^m / (2^nu m! Gamma(m + nu + 1))`, Neumaier-compensated.
fn reduced_series(nu: f64, z: f64) -> Result<f64> {
    let mut term = 1.0 / (2f64.powf(nu) * gamma_fn(nu + 1.0)?);
    let q = -0.25 * z * z;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for m in 0..200 {
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        let m = m as f64;
        term *= q / ((m + 1.0) * (m + nu + 1.0));
    }
    Ok(sum + comp)
}

/// Continued-fraction evaluation of `J_nu(x)` for `x >= 2`: CF1 fixes the ratio
/// `J'_nu/J_nu`, downward recurrence carries it to an order in `[-1/2, 1/2)`,
/// Steed's CF2 plus the Wronskian normalises it there.
fn steed(nu: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 100_000;

    let nl = (nu + 0.5).floor().max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    let mut isign = 1.0;
    let mut h = (nu * xi).abs().max(FPMIN) * if nu < 0.0 { -1.0 } else { 1.0 };
    if h == 0.0 {
        h = FPMIN;
    }
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let mut a = 0.25 - xmu * xmu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..MAXIT {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let mut rjmu = (w / ((p - f) * gam + q)).sqrt();
    if rjl < 0.0 {
        rjmu = -rjmu;
    }
    rjl1 * (rjmu / rjl)
}

/// `C_mu = prod_i 2^mu_i Gamma(mu_i + 1)`.
pub fn c_mu(mu: &MuVector) -> Result<f64> {
    let mut acc = 1.0;
    for m in mu.to_f64() {
        acc *= 2f64.powf(m) * gamma_fn(m + 1.0)?;
    }
    Ok(acc)
}

/// `C_k^mu = (-1)^|k| C_mu / C_{mu+k}`, evaluated through `c_mu` on both orders.
pub fn c_k_mu(mu: &MuVector, k: &MultiIndex) -> Result<f64> {
    mu.check_dim(k.dim())?;
    let sign = if k.length() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * c_mu(mu)? / c_mu(&mu.shifted(k))?)
}

/// Exact `C_k^mu`: the Gamma recurrence turns the ratio into
/// `prod_i prod_{j=1..k_i} -1 / (2 (mu_i + j))`.
pub fn c_k_mu_exact(mu: &MuVector, k: &MultiIndex) -> Result<Rational> {
    mu.check_dim(k.dim())?;
    let mut acc = Rational::one();
    for (m, &kk) in mu.orders().iter().zip(k.entries()) {
        for j in 1..=kk {
            let denom = (m + rational::int(j as i64)) * rational::int(2);
            acc = -acc / denom;
        }
    }
    debug_assert!(!acc.is_negative() || k.length() % 2 == 1);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gamma_examples() {
        assert!(close(gamma_fn(1.0).unwrap(), 1.0, 1e-14));
        assert!(close(gamma_fn(0.5).unwrap(), 1.772_453_850_905_516, 1e-14));
        assert!(close(gamma_fn(5.0).unwrap(), 24.0, 1e-12));
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn gamma_large_argument_relative() {
        // Gamma(50) = 49!
        let exact = 6.082_818_640_342_675e62;
        assert!((gamma_fn(50.0).unwrap() / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_recurrence() {
        let mut x = 0.1;
        while x <= 20.0 {
            let g1 = gamma_fn(x + 1.0).unwrap();
            let g = gamma_fn(x).unwrap();
            assert!((g1 - x * g).abs() <= 1e-12 * g1, "x = {x}");
            x += 0.0731;
        }
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
        assert!(close(
            bessel_j(0.5, PI / 2.0).unwrap(),
            2.0 / PI,
            1e-12
        ));
        assert!(bessel_j(-0.6, 1.0).is_err());
        assert!(bessel_j(0.0, 250.0).is_err());
        assert!(bessel_j(-0.5, 0.0).is_err());
    }

    #[test]
    fn bessel_reference_values() {
        // independent values from a multiprecision library
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_55),
            (0.0, 10.0, -0.245_935_764_451_348_34),
            (1.0, 2.5, 0.497_094_102_464_274_04),
            (2.0, 30.0, 0.078_451_246_073_265_349),
            (3.5, 7.25, -0.071_983_490_654_783_525),
            (20.0, 15.0, 0.007_360_234_079_223_485_3),
            (20.0, 50.0, -0.116_704_352_759_579_74),
            (1.0 / 3.0, 4.0, -0.355_427_373_454_575_99),
            (-0.25, 0.7, 0.893_646_070_946_695_01),
            (0.0, 150.0, -0.000_774_090_375_394_291_25),
        ];
        for (nu, z, want) in cases {
            let got = bessel_j(nu, z).unwrap();
            assert!(close(got, want, 1e-12), "J_{nu}({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn half_order_closed_forms() {
        let mut z = 0.01;
        while z <= 50.0 {
            let s = (2.0 / (PI * z)).sqrt();
            assert!(close(bessel_j(0.5, z).unwrap(), s * z.sin(), 1e-10), "z={z}");
            assert!(close(bessel_j(-0.5, z).unwrap(), s * z.cos(), 1e-10), "z={z}");
            let j32 = s * (z.sin() / z - z.cos());
            assert!(close(bessel_j(1.5, z).unwrap(), j32, 1e-10), "z={z}");
            z += 0.0173;
        }
    }

    #[test]
    fn reduced_bessel_limits() {
        assert!(close(reduced_bessel(0.0, 0.0).unwrap(), 1.0, 1e-15));
        let lim = 1.0 / (2f64.sqrt() * gamma_fn(1.5).unwrap());
        assert!(close(reduced_bessel(0.5, 0.0).unwrap(), lim, 1e-14));
        assert!(close(lim, 0.797_884_560_8, 1e-10));
        assert!(close(reduced_bessel(0.5, PI).unwrap(), 0.0, 1e-14));
        // continuity across the series/continued-fraction switch
        for nu in [-0.5, 0.0, 0.5, 1.0, 3.5, 10.0] {
            let a = reduced_bessel(nu, SERIES_CUTOFF - 1e-12).unwrap();
            let b = reduced_bessel(nu, SERIES_CUTOFF + 1e-12).unwrap();
            assert!((a - b).abs() <= 1e-11, "nu={nu}");
        }
    }

    #[test]
    fn derivative_identity_by_finite_differences() {
        let h = 1e-4;
        for nu in [0.0, 0.5, 1.0, 1.5] {
            let mut z = 0.1;
            while z <= 20.0 {
                let fd = (reduced_bessel(nu, z + h).unwrap() - reduced_bessel(nu, z - h).unwrap())
                    / (2.0 * h);
                let rhs = -z * reduced_bessel(nu + 1.0, z).unwrap();
                assert!((fd - rhs).abs() <= 1e-6, "nu={nu} z={z}");
                z += 0.137;
            }
        }
    }

    #[test]
    fn c_mu_examples() {
        let m = |p: &[(i64, i64)]| MuVector::from_ratios(p).unwrap();
        assert!(close(c_mu(&m(&[(0, 1)])).unwrap(), 1.0, 1e-15));
        assert!(close(c_mu(&m(&[(1, 2)])).unwrap(), 1.253_314_137_3, 1e-10));
        assert!(close(c_mu(&m(&[(1, 2), (-1, 2)])).unwrap(), PI / 2.0, 1e-12));
    }

    #[test]
    fn c_k_mu_examples() {
        let m = |p: &[(i64, i64)]| MuVector::from_ratios(p).unwrap();
        let half = m(&[(1, 2)]);
        assert!(close(c_k_mu(&half, &[0].into()).unwrap(), 1.0, 1e-15));
        assert!(close(c_k_mu(&half, &[1].into()).unwrap(), -1.0 / 3.0, 1e-14));
        assert_eq!(c_k_mu_exact(&half, &[1].into()).unwrap(), rational::ratio(-1, 3));
        let two = m(&[(1, 2), (1, 2)]);
        assert!(close(c_k_mu(&two, &[1, 1].into()).unwrap(), 1.0 / 9.0, 1e-14));
        assert_eq!(c_k_mu_exact(&two, &[1, 1].into()).unwrap(), rational::ratio(1, 9));
    }

    #[test]
    fn c_k_mu_step_recurrence() {
        let mu = MuVector::from_ratios(&[(-1, 2), (0, 1), (3, 2)]).unwrap();
        for k in crate::multiindex::graded_enumerate(3, 4) {
            let base = c_k_mu(&mu, &k).unwrap();
            for j in 0..3 {
                let kj = k.add(&MultiIndex::unit(3, j));
                let step = c_k_mu(&mu, &kj).unwrap();
                let want = base * -1.0 / (2.0 * (mu.order_f64(j) + k.get(j) as f64 + 1.0));
                assert!((step - want).abs() <= 1e-12 * want.abs());
                let exact = rational::to_f64(&c_k_mu_exact(&mu, &kj).unwrap());
                assert!((exact - step).abs() <= 1e-12 * exact.abs());
            }
        }
    }

    #[test]
    fn mu_validation() {
        assert!(MuVector::from_ratios(&[(-1, 1)]).is_err());
        let err = MuVector::from_ratios(&[(0, 1), (-3, 4)]).unwrap_err();
        assert!(err.to_string().contains("mu_i >= -1/2"));
        let mu: MuVector = serde_json::from_str(r#"["1/2", 0, -0.5]"#).unwrap();
        assert_eq!(serde_json::to_string(&mu).unwrap(), r#"["1/2","0","-1/2"]"#);
        assert!(serde_json::from_str::<MuVector>(r#"["-1"]"#).is_err());
    }
}
