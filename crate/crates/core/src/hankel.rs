//! Tensor grids and numerical Hankel transforms
//! `(h_mu f)(y) = int f(x) prod_i sqrt(x_i y_i) J_{mu_i}(x_i y_i) dx`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::special::{bessel_j, MuVector};
use crate::symbolic::SymbolicHFunction;

/// Upper bound on grid points (all axes together).
pub const MAX_GRID_POINTS: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct GridSpec {
    axes: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRepr {
    axes: Vec<Vec<f64>>,
}

impl TryFrom<GridRepr> for GridSpec {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        GridSpec::new(r.axes)
    }
}

impl From<GridSpec> for GridRepr {
    fn from(g: GridSpec) -> Self {
        GridRepr { axes: g.axes }
    }
}

impl GridSpec {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_limit(axes, MAX_GRID_POINTS)
    }

    pub fn with_limit(axes: Vec<Vec<f64>>, limit: usize) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Domain("grid needs at least one axis".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Domain(format!("grid axis {} is empty", i + 1)));
            }
            if a.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(Error::Domain(format!("grid axis {} has a non-positive node", i + 1)));
            }
            if a.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Domain(format!("grid axis {} is not strictly increasing", i + 1)));
            }
        }
        let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len()));
        match total {
            Some(t) if t <= limit => Ok(GridSpec { axes }),
            _ => Err(Error::LimitExceeded(format!("grid exceeds {limit} points"))),
        }
    }

    /// `count` equally spaced nodes on `[lo, hi]` for each of `n` axes.
    pub fn uniform(n: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::new(vec![linspace(lo, hi, count); n])
    }

    /// `count` geometrically spaced nodes on `[lo, hi]` for each of `n` axes.
    pub fn geometric(n: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = if count == 1 {
            vec![lo]
        } else {
            let r = (hi / lo).ln() / (count - 1) as f64;
            (0..count).map(|i| lo * (r * i as f64).exp()).collect()
        };
        Self::new(vec![axis; n])
    }

    /// The same node sequence on every axis.
    pub fn from_rule(n: usize, rule: &QuadratureRule) -> Result<Self> {
        Self::new(vec![rule.nodes.clone(); n])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the point with row-major flat index `idx` (last axis fastest).
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for (i, a) in self.axes.iter().enumerate().rev() {
            x[i] = a[idx % a.len()];
            idx /= a.len();
        }
        x
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Values sampled on a [`GridSpec`], row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub mu: MuVector,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>, mu: MuVector) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::DimensionMismatch {
                expected: spec.len(),
                got: values.len(),
            });
        }
        mu.check_dim(spec.dim())?;
        Ok(GridFunction { spec, values, mu })
    }

    pub fn sample(mu: MuVector, spec: GridSpec, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self> {
        let values = sample_grid(&spec, f);
        Self::new(spec, values, mu)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.spec.dim()).map(|i| format!("x{i}")).collect();
        header.push("value".into());
        out.write_record(&header).map_err(csv_err)?;
        for (i, v) in self.values.iter().enumerate() {
            let mut rec: Vec<String> = self.spec.point(i).iter().map(|x| format!("{x:e}")).collect();
            rec.push(format!("{v:e}"));
            out.write_record(&rec).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    /// Reads a CSV written by [`GridFunction::write_csv`]; rows must be in row-major order.
    pub fn read_csv<R: std::io::Read>(r: R, mu: MuVector) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let n = rd.headers().map_err(csv_err)?.len().saturating_sub(1);
        if n == 0 {
            return Err(Error::Parse("grid CSV needs x1..xn,value columns".into()));
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let mut axes: Vec<Vec<f64>> = vec![Vec::new(); n];
        for row in &rows {
            for (i, axis) in axes.iter_mut().enumerate() {
                if !axis.contains(&row[i]) {
                    axis.push(row[i]);
                }
            }
        }
        for axis in axes.iter_mut() {
            axis.sort_by(f64::total_cmp);
        }
        let spec = GridSpec::new(axes)?;
        if spec.len() != rows.len() {
            return Err(Error::Parse("CSV rows do not form a tensor grid".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if spec.point(i) != row[..n] {
                return Err(Error::Parse("CSV rows are not in row-major order".into()));
            }
        }
        let values = rows.iter().map(|r| r[n]).collect();
        Self::new(spec, values, mu)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn sample_grid(spec: &GridSpec, f: impl Fn(&[f64]) -> f64 + Sync) -> Vec<f64> {
    (0..spec.len())
        .into_par_iter()
        .map(|i| f(&spec.point(i)))
        .collect()
}

/// `K[y][j] = w_j sqrt(x_j y) J_alpha(x_j y)`, row-major `ys.len() x rule.len()`.
pub fn kernel_matrix(alpha: f64, ys: &[f64], rule: &QuadratureRule) -> Result<Vec<f64>> {
    let rows: Vec<Vec<f64>> = ys
        .par_iter()
        .map(|&y| {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| {
                    let z = x * y;
                    Ok(w * z.sqrt() * bessel_j(alpha, z)?)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

/// `(h_alpha f)(y)` at each `y` by the truncated rule.
pub fn hankel_1d(alpha: f64, f: impl Fn(f64) -> f64 + Sync, ys: &[f64], rule: &QuadratureRule) -> Result<Vec<f64>> {
    if alpha < -0.5 {
        return Err(Error::Domain(format!("order {alpha} violates alpha >= -1/2")));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::Domain("output nodes must be positive".into()));
    }
    let fx: Vec<f64> = rule.nodes.iter().map(|&x| f(x)).collect();
    let k = kernel_matrix(alpha, ys, rule)?;
    let m = rule.len();
    Ok((0..ys.len())
        .map(|r| k[r * m..(r + 1) * m].iter().zip(&fx).map(|(a, b)| a * b).sum())
        .collect())
}

/// Which evaluation path [`hankel_nd_with`] takes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NdMethod {
    /// n successive 1-D transforms, contracting axes in the given order.
    AxisByAxis(Vec<usize>),
    /// Full tensor sum for every output point.
    Direct,
}

/// n-D transform of `f` onto `grid` with `rule` on every axis (axis-by-axis path).
pub fn hankel_nd(
    mu: &MuVector,
    f: impl Fn(&[f64]) -> f64 + Sync,
    grid: &GridSpec,
    rule: &QuadratureRule,
) -> Result<GridFunction> {
    let order: Vec<usize> = (0..grid.dim()).collect();
    hankel_nd_with(mu, f, grid, rule, &NdMethod::AxisByAxis(order))
}

pub fn hankel_nd_with(
    mu: &MuVector,
    f: impl Fn(&[f64]) -> f64 + Sync,
    grid: &GridSpec,
    rule: &QuadratureRule,
    method: &NdMethod,
) -> Result<GridFunction> {
    mu.check_dim(grid.dim())?;
    let nodes = GridSpec::from_rule(grid.dim(), rule)?;
    let samples = sample_grid(&nodes, f);
    hankel_nd_sampled(mu, &samples, grid, rule, method)
}

/// Transform of values already sampled on the tensor nodes of `rule`.
pub fn hankel_nd_sampled(
    mu: &MuVector,
    samples: &[f64],
    grid: &GridSpec,
    rule: &QuadratureRule,
    method: &NdMethod,
) -> Result<GridFunction> {
    let n = grid.dim();
    mu.check_dim(n)?;
    let m = rule.len();
    let expected = m.checked_pow(n as u32).unwrap_or(usize::MAX);
    if samples.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: samples.len(),
        });
    }
    let kernels: Vec<Vec<f64>> = (0..n)
        .map(|i| kernel_matrix(mu.order_f64(i), &grid.axes()[i], rule))
        .collect::<Result<_>>()?;
    let values = match method {
        NdMethod::AxisByAxis(order) => {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(Error::Domain(format!("{order:?} is not a permutation of the axes")));
            }
            let mut shape = vec![m; n];
            let mut data = samples.to_vec();
            for &axis in order {
                let rows = grid.axes()[axis].len();
                data = contract_axis(&data, &shape, axis, &kernels[axis], rows);
                shape[axis] = rows;
            }
            data
        }
        NdMethod::Direct => direct_sum(samples, grid, &kernels, m),
    };
    GridFunction::new(grid.clone(), values, mu.clone())
}

/// `out[o, y, i] = sum_j k[y][j] data[o, j, i]` along `axis`.
fn contract_axis(data: &[f64], shape: &[usize], axis: usize, k: &[f64], rows: usize) -> Vec<f64> {
    let cols = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![0.0; outer * rows * inner];
    out.par_chunks_mut(rows * inner)
        .enumerate()
        .for_each(|(o, block)| {
            let src = &data[o * cols * inner..(o + 1) * cols * inner];
            for y in 0..rows {
                let krow = &k[y * cols..(y + 1) * cols];
                let dst = &mut block[y * inner..(y + 1) * inner];
                for (j, &kv) in krow.iter().enumerate() {
                    let s = &src[j * inner..(j + 1) * inner];
                    for (d, &v) in dst.iter_mut().zip(s) {
                        *d += kv * v;
                    }
                }
            }
        });
    out
}

fn direct_sum(samples: &[f64], grid: &GridSpec, kernels: &[Vec<f64>], m: usize) -> Vec<f64> {
    let n = grid.dim();
    let shape = grid.shape();
    (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut yi = vec![0usize; n];
            let mut rest = flat;
            for i in (0..n).rev() {
                yi[i] = rest % shape[i];
                rest /= shape[i];
            }
            let mut sum = 0.0;
            for (j, &s) in samples.iter().enumerate() {
                let mut w = s;
                let mut r = j;
                for i in (0..n).rev() {
                    w *= kernels[i][yi[i] * m + r % m];
                    r /= m;
                }
                sum += w;
            }
            sum
        })
        .collect()
}

/// `int f g` over the orthant with `rule` on every axis.
pub fn pair_quadrature(
    n: usize,
    f: impl Fn(&[f64]) -> f64 + Sync,
    g: impl Fn(&[f64]) -> f64 + Sync,
    rule: &QuadratureRule,
) -> Result<f64> {
    integrate_nd(n, |x| f(x) * g(x), rule)
}

/// `int f` over `[0, X]^n` by the tensor rule.
pub fn integrate_nd(n: usize, f: impl Fn(&[f64]) -> f64 + Sync, rule: &QuadratureRule) -> Result<f64> {
    let nodes = GridSpec::from_rule(n, rule)?;
    let w = tensor_weights(n, rule);
    let vals = sample_grid(&nodes, f);
    Ok(vals.iter().zip(&w).map(|(a, b)| a * b).sum())
}

/// Product weights on the tensor nodes of `rule`, row-major.
pub fn tensor_weights(n: usize, rule: &QuadratureRule) -> Vec<f64> {
    let mut w = vec![1.0];
    for _ in 0..n {
        w = w
            .iter()
            .flat_map(|a| rule.weights.iter().map(move |b| a * b))
            .collect();
    }
    w
}

/// `h_mu(h_mu phi)` on `grid`: the first transform is evaluated at the nodes of
/// `second`, then transformed again with that rule.
pub fn hankel_round_trip(
    phi: &SymbolicHFunction,
    grid: &GridSpec,
    first: &QuadratureRule,
    second: &QuadratureRule,
) -> Result<GridFunction> {
    let n = phi.dim();
    let f = phi.compile();
    let mid = GridSpec::from_rule(n, second)?;
    let order: Vec<usize> = (0..n).collect();
    let inner = hankel_nd(&phi.mu, |x| f.eval_unchecked(x), &mid, first)?;
    hankel_nd_sampled(&phi.mu, &inner.values, grid, second, &NdMethod::AxisByAxis(order))
}

/// Rules suited to `phi` and to its transform: Gaussian rate `c` maps to `1/(4c)`.
pub fn default_rules(phi: &SymbolicHFunction) -> Result<(QuadratureRule, QuadratureRule)> {
    let c = crate::rational::to_f64(&phi.decay);
    if !(c > 0.0) {
        return Err(Error::DecayRequired);
    }
    Ok((QuadratureRule::for_decay(c)?, QuadratureRule::for_decay(1.0 / (4.0 * c))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_quadrature;

    fn mu(v: &[(i64, i64)]) -> MuVector {
        MuVector::from_ratios(v).unwrap()
    }

    #[test]
    fn zero_input() {
        let rule = QuadratureRule::for_decay(0.5).unwrap();
        let out = hankel_1d(0.0, |_| 0.0, &[0.5, 1.0], &rule).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
        let g = GridSpec::uniform(2, 0.1, 4.0, 5).unwrap();
        let out = hankel_nd(&mu(&[(0, 1), (0, 1)]), |_| 0.0, &g, &rule).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_transform_of_gaussian() {
        let rule = QuadratureRule::for_decay(0.5).unwrap();
        let ys = linspace(0.1, 5.0, 50);
        let out = hankel_1d(0.5, |x| x * (-x * x / 2.0).exp(), &ys, &rule).unwrap();
        for (y, v) in ys.iter().zip(out) {
            assert!((v - y * (-y * y / 2.0).exp()).abs() < 1e-8, "y={y}");
        }
    }

    #[test]
    fn self_convergence_for_exponential() {
        let f = |x: f64| (-x).exp() * x.sqrt();
        // the sqrt(x) endpoint behaviour needs narrower panels than the Gaussian default
        let coarse = build_quadrature(40.0, 24, 64).unwrap();
        let fine = build_quadrature(40.0, 24, 256).unwrap();
        let a = hankel_1d(0.5, f, &[1.0], &coarse).unwrap()[0];
        let b = hankel_1d(0.5, f, &[1.0], &fine).unwrap()[0];
        assert!((a - b).abs() < 1e-8, "{a} {b}");
        // mpmath reference
        assert!((b - 0.388443493507509).abs() < 1e-8);
    }

    #[test]
    fn two_dimensional_gaussian() {
        let rule = QuadratureRule::for_decay(0.5).unwrap();
        let g = GridSpec::uniform(2, 0.1, 4.0, 12).unwrap();
        let out = hankel_nd(&mu(&[(1, 2), (1, 2)]), |x| x[0] * x[1] * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), &g, &rule).unwrap();
        for (i, v) in out.values.iter().enumerate() {
            let y = g.point(i);
            let want = y[0] * y[1] * (-(y[0] * y[0] + y[1] * y[1]) / 2.0).exp();
            assert!((v - want).abs() < 1e-7);
        }
    }

    #[test]
    fn separable_factorises_and_paths_agree() {
        let rule = QuadratureRule::for_decay(0.5).unwrap();
        let m = mu(&[(0, 1), (3, 2)]);
        let gx = |x: f64| x.sqrt() * (1.0 + x * x) * (-x * x / 2.0).exp();
        let hx = |x: f64| x * x * (-x * x / 2.0).exp();
        let g = GridSpec::new(vec![linspace(0.2, 3.0, 7), linspace(0.1, 4.0, 9)]).unwrap();
        let f = |x: &[f64]| gx(x[0]) * hx(x[1]);
        let a = hankel_nd(&m, f, &g, &rule).unwrap();
        let b = hankel_nd_with(&m, f, &g, &rule, &NdMethod::AxisByAxis(vec![1, 0])).unwrap();
        let c = hankel_nd_with(&m, f, &g, &rule, &NdMethod::Direct).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-9);
        assert!(a.max_abs_diff(&c) < 1e-9);
        let one = hankel_1d(0.0, gx, &g.axes()[0], &rule).unwrap();
        let two = hankel_1d(1.5, hx, &g.axes()[1], &rule).unwrap();
        for (i, v) in a.values.iter().enumerate() {
            let want = one[i / 9] * two[i % 9];
            assert!((v - want).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = GridSpec::new(vec![vec![0.5, 1.0], vec![0.25, 2.0, 3.0]]).unwrap();
        let f = GridFunction::sample(mu(&[(0, 1), (1, 2)]), g, |x| x[0] - 3.0 * x[1]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,value\n"));
        let back = GridFunction::read_csv(&buf[..], f.mu.clone()).unwrap();
        assert_eq!(back, f);
        let json = serde_json::to_string(&f).unwrap();
        let back: GridFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(vec![vec![0.0, 1.0]]).is_err());
        assert!(GridSpec::new(vec![vec![2.0, 1.0]]).is_err());
        assert!(matches!(
            GridSpec::with_limit(vec![vec![1.0, 2.0]; 3], 7),
            Err(Error::LimitExceeded(_))
        ));
    }
}
