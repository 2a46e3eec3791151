//! Closed-form exponents of `L_μ`, the discrete Hardy constant and the
//! principal eigenpair of `-L_μ`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};
use crate::geometry::{Field, Grid};
use crate::linalg::{dense, CsrMatrix};
use crate::operator::{hardy_weight, stiffness, DiscreteOperator, DENSE_LIMIT};
use crate::scalar::Scalar;

/// Exponents `α± = 1/2 ± √(1/4 - μ)` and the critical exponent
/// `q_c = (N + α+)/(N - 1 - α-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyExponents<T> {
    pub mu: T,
    pub dim: usize,
    pub alpha_plus: T,
    pub alpha_minus: T,
    pub q_crit: T,
    pub lambda1: Option<T>,
}

impl<T: Scalar> HardyExponents<T> {
    pub fn new(mu: T, dim: usize) -> Result<Self> {
        let quarter = T::lit(0.25);
        if !(mu >= T::zero() && mu <= quarter) {
            return Err(HardyError::Range {
                what: "mu",
                value: mu.to_f64_lossy(),
                lo: 0.0,
                hi: 0.25,
            });
        }
        if dim < 2 {
            return Err(HardyError::Parameter(format!("dimension {dim} < 2")));
        }
        let half = T::lit(0.5);
        let root = (quarter - mu).max(T::zero()).sqrt();
        let alpha_plus = half + root;
        let alpha_minus = half - root;
        let n = T::lit(dim as f64);
        Ok(Self {
            mu,
            dim,
            alpha_plus,
            alpha_minus,
            q_crit: (n + alpha_plus) / (n - T::one() - alpha_minus),
            lambda1: None,
        })
    }

    pub fn is_subcritical(&self, q: T) -> bool {
        q < self.q_crit
    }

    /// `α+ - α-`, the decay rate of traces of Green potentials.
    pub fn gap(&self) -> T {
        self.alpha_plus - self.alpha_minus
    }
}

/// `exponents(μ, N)`; `λ₁` is left unset.
pub fn exponents<T: Scalar>(mu: T, dim: usize) -> Result<HardyExponents<T>> {
    HardyExponents::new(mu, dim)
}

/// Number of eigenvalues of `K v = λ W v` below `sigma`.
fn count_below(k: &CsrMatrix<f64>, w: &[f64], sigma: f64) -> Result<usize> {
    let shift: Vec<f64> = w.iter().map(|x| -sigma * x).collect();
    Ok(k.plus_diagonal(&shift)?.to_band().factorize()?.negative_pivots())
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyConstant {
    pub value: f64,
    /// Bracket certified by inertia counts.
    pub lower: f64,
    pub upper: f64,
    pub factorizations: usize,
    pub iterations: usize,
}

/// Smallest eigenvalue of the pencil (stiffness, `V/δ²`): the minimum over mesh
/// functions of `∫|∇u|² / ∫(u/δ)²`.
///
/// Sylvester inertia bisection on `K - σW` brackets the eigenvalue, shifted
/// inverse iteration from the lower end of the bracket polishes it to a
/// relative tolerance `1e-8`, and a final pair of inertia counts certifies the
/// result.
pub fn hardy_constant(grid: &Grid) -> Result<HardyConstant> {
    let k = stiffness(grid);
    let w = hardy_weight(grid);
    let mut factorizations = 0;
    let mut count = |s: f64| {
        factorizations += 1;
        count_below(&k, &w, s)
    };
    let (mut lo, mut hi) = (0.0, 0.5);
    while count(hi)? == 0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(HardyError::Numerical("no eigenvalue found".into()));
        }
    }
    while hi - lo > 1e-4 * hi {
        let mid = 0.5 * (lo + hi);
        if count(mid)? == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let shift: Vec<f64> = w.iter().map(|x| -lo * x).collect();
    let ldl = k.plus_diagonal(&shift)?.to_band().factorize()?;
    let mut v: Vec<f64> = vec![1.0; grid.len()];
    let mut lambda = hi;
    let mut iterations = 0;
    for it in 1..=500 {
        iterations = it;
        let wv: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * b).collect();
        let mut x = ldl.solve(&wv);
        let norm = x.iter().zip(&w).map(|(a, b)| a * a * b).sum::<f64>().sqrt();
        x.iter_mut().for_each(|a| *a /= norm);
        let kx = k.mul_vec(&x);
        let rq = x.iter().zip(&kx).map(|(a, b)| a * b).sum::<f64>();
        v = x;
        let done = (rq - lambda).abs() <= 1e-10 * rq;
        lambda = rq;
        if done {
            break;
        }
    }
    let value = lambda;
    let lower = value * (1.0 - 1e-8);
    let upper = value * (1.0 + 1e-8);
    let below = count(lower)?;
    let above = count(upper)?;
    if below != 0 || above == 0 {
        return Err(HardyError::Convergence {
            method: "hardy_constant",
            iterations,
            last: value,
            trace: vec![lo, hi, value],
        });
    }
    Ok(HardyConstant {
        value,
        lower,
        upper,
        factorizations,
        iterations,
    })
}

/// Dense oracle for [`hardy_constant`] on small grids.
pub fn hardy_constant_dense(grid: &Grid) -> Result<f64> {
    if grid.len() > DENSE_LIMIT {
        return Err(HardyError::Parameter(format!(
            "dense oracle limited to {DENSE_LIMIT} nodes"
        )));
    }
    let ev = dense::generalized_eigenvalues(&stiffness(grid), &hardy_weight(grid));
    Ok(ev[0])
}

/// Principal eigenpair of `-L_μ` with the normalization `∫ φ²/δ² = 1`.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub lambda: f64,
    pub phi: Field,
    /// Second eigenvalue from deflated inverse iteration.
    pub lambda2: f64,
    pub residual: f64,
    pub iterations: usize,
    pub seed: u64,
}

pub const EIGEN_SEED: u64 = 0x5eed_0001;

fn weighted_dot(a: &[f64], b: &[f64], m: &[f64]) -> f64 {
    a.iter().zip(b).zip(m).map(|((x, y), w)| x * y * w).sum()
}

/// Inverse iteration on `(A, M)` keeping `v` `M`-orthogonal to `deflate`.
fn inverse_iteration(
    op: &DiscreteOperator,
    start: Vec<f64>,
    deflate: Option<&[f64]>,
    tol: f64,
) -> Result<(f64, Vec<f64>, usize)> {
    let ldl = op.factorization()?;
    let m = op.grid().volumes();
    let a = op.matrix();
    let project = |v: &mut Vec<f64>| {
        if let Some(d) = deflate {
            let c = weighted_dot(v, d, m) / weighted_dot(d, d, m);
            v.iter_mut().zip(d).for_each(|(x, y)| *x -= c * y);
        }
    };
    let mut v = start;
    project(&mut v);
    let mut lambda = f64::INFINITY;
    let mut trace = Vec::new();
    for it in 1..=2000 {
        let mv: Vec<f64> = v.iter().zip(m).map(|(x, w)| x * w).collect();
        let mut x = ldl.solve(&mv);
        project(&mut x);
        let norm = weighted_dot(&x, &x, m).sqrt();
        x.iter_mut().for_each(|y| *y /= norm);
        let rq = weighted_dot(&x, &a.mul_vec(&x), &vec![1.0; x.len()]);
        let ax = a.mul_vec(&x);
        let res = ax
            .iter()
            .zip(&x)
            .zip(m)
            .map(|((p, q), w)| (p - rq * w * q).powi(2))
            .sum::<f64>()
            .sqrt()
            / x.iter().zip(m).map(|(q, w)| (rq * w * q).powi(2)).sum::<f64>().sqrt();
        v = x;
        trace.push(res);
        let settled = (rq - lambda).abs() <= 1e-14 * rq.abs();
        lambda = rq;
        if res <= tol || (settled && res <= 10.0 * tol) {
            return Ok((lambda, v, it));
        }
    }
    Err(HardyError::Convergence {
        method: "inverse_iteration",
        iterations: 2000,
        last: lambda,
        trace,
    })
}

/// `(λ_{μ,1}, φ_{μ,1})`; `φ > 0` at every node and `∫φ²/δ² = 1`.
pub fn principal_eigenpair(grid: &Arc<Grid>, mu: f64) -> Result<Eigenpair> {
    let op = DiscreteOperator::assemble(grid, mu, 0.0)?;
    principal_eigenpair_of(&op)
}

pub fn principal_eigenpair_of(op: &DiscreteOperator) -> Result<Eigenpair> {
    let grid = op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(EIGEN_SEED);
    let start: Vec<f64> = (0..grid.len()).map(|_| 0.5 + rng.random::<f64>()).collect();
    let (lambda, mut v, iterations) = inverse_iteration(op, start, None, 1e-9)?;
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let scale = weighted_dot(&v, &v, op.hardy_weight()).sqrt();
    v.iter_mut().for_each(|x| *x /= scale);
    if let Some(bad) = v.iter().position(|x| *x <= 0.0) {
        return Err(HardyError::Numerical(format!(
            "principal eigenvector not positive at node {bad}"
        )));
    }
    let start2: Vec<f64> = (0..grid.len()).map(|_| rng.random::<f64>() - 0.5).collect();
    let (lambda2, _, _) = inverse_iteration(op, start2, Some(&v), 1e-6)?;
    let m = grid.volumes();
    let av = op.matrix().mul_vec(&v);
    let residual = av
        .iter()
        .zip(&v)
        .zip(m)
        .map(|((p, q), w)| (p - lambda * w * q).powi(2))
        .sum::<f64>()
        .sqrt()
        / v.iter().zip(m).map(|(q, w)| (lambda * w * q).powi(2)).sum::<f64>().sqrt();
    Ok(Eigenpair {
        lambda,
        phi: Field::new(grid, v)?,
        lambda2,
        residual,
        iterations,
        seed: EIGEN_SEED,
    })
}

/// Least-squares slope of `ln u` against `ln δ` along one ray.
pub fn ray_slope(grid: &Grid, values: &[f64], ray: usize, window: (f64, f64)) -> Result<Option<f64>> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &k in &grid.rays()[ray].nodes {
        let d = grid.deltas()[k];
        if d >= window.0 && d <= window.1 {
            let u = values[k];
            if !(u > 0.0) {
                return Err(HardyError::Numerical(format!(
                    "nonpositive sample {u} at delta {d}"
                )));
            }
            xs.push(d.ln());
            ys.push(u.ln());
        }
    }
    Ok(least_squares_slope(&xs, &ys))
}

/// Slope of the least-squares line through `(x, y)`; `None` below 3 points.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 3 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Default fit window `(β₀/32, β₀/4)`.
pub fn default_window(grid: &Grid) -> (f64, f64) {
    let b = grid.domain().beta0;
    (b / 32.0, b / 4.0)
}

/// Boundary exponent of `u`: the slope of `ln u` against `ln δ` along the
/// probe rays through `window`, averaged over rays.
pub fn boundary_exponent_fit(u: &Field, window: (f64, f64)) -> Result<f64> {
    let grid = u.grid();
    let beta0 = grid.domain().beta0;
    let floor = 2.0 * grid.boundary_cell_width();
    if !(window.0 >= floor && window.0 < window.1 && window.1 < beta0) {
        return Err(HardyError::Range {
            what: "fit window",
            value: window.0,
            lo: floor,
            hi: window.1.min(beta0),
        });
    }
    let mut slopes = Vec::new();
    for r in grid.probe_rays() {
        if let Some(s) = ray_slope(grid, u.values(), r, window)? {
            slopes.push(s);
        }
    }
    if slopes.is_empty() {
        return Err(HardyError::Numerical("fit window holds fewer than 3 nodes".into()));
    }
    Ok(slopes.iter().sum::<f64>() / slopes.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, GridOptions};

    #[test]
    fn exponent_identities() {
        for mu in [0.0f64, 0.05, 0.1, 0.1875, 0.24, 0.25] {
            let e = exponents(mu, 2).unwrap();
            assert!((e.alpha_plus + e.alpha_minus - 1.0).abs() < 1e-15);
            assert!((e.alpha_plus * e.alpha_minus - mu).abs() < 1e-15);
            assert!(e.q_crit > 1.0);
        }
        let e = exponents(0.1875f64, 2).unwrap();
        assert_eq!((e.alpha_plus, e.alpha_minus), (0.75, 0.25));
        assert!((e.q_crit - 11.0 / 3.0).abs() < 1e-15);
        let e = exponents(0.0f32, 2).unwrap();
        assert_eq!((e.alpha_plus, e.alpha_minus, e.q_crit), (1.0, 0.0, 3.0));
        assert!(exponents(0.3, 2).is_err());
        assert!(exponents(-0.1, 2).is_err());
    }

    #[test]
    fn inverse_iteration_matches_dense_on_small_grid() {
        let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(12)).unwrap();
        let c = hardy_constant(&g).unwrap();
        let d = hardy_constant_dense(&g).unwrap();
        assert!((c.value - d).abs() <= 1e-8 * d, "{} {}", c.value, d);
    }

    #[test]
    fn eigenpair_is_normalized_and_positive() {
        let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(24)).unwrap();
        let ep = principal_eigenpair(&g, 0.1).unwrap();
        let norm: f64 = ep
            .phi
            .values()
            .iter()
            .zip(hardy_weight(&g))
            .map(|(p, w)| p * p * w)
            .sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(ep.phi.min_value() > 0.0);
        assert!(ep.lambda2 > ep.lambda);
        assert!(ep.residual <= 1e-8);
    }

    #[test]
    fn exact_power_law_fit() {
        let g = Grid::new(DomainSpec::halfspace_box(1.0, 1.0), GridOptions::graded(32)).unwrap();
        let u = Field::from_fn(&g, |p, _| p[0].powf(0.75));
        let s = boundary_exponent_fit(&u, default_window(&g)).unwrap();
        assert!((s - 0.75).abs() < 1e-6);
    }
}
