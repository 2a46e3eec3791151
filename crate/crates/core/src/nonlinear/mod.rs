//! The absorption problem `-L_μ u + u^q = 0` in `Ω` with normalized boundary
//! trace `ν`, equivalently
//!
//! ```text
//! u + 𝔾[u^q] = 𝕂[ν].
//! ```
//!
//! Discretely this is `A u + M u^q = b_ν` with `A` the matrix of `-L_μ`, `M`
//! the lumped mass and `b_ν` the Martin load. Two constructions are provided.
//!
//! The exhaustion fixes `u = 𝕂[ν]` on the nodes with `δ ≤ β` and solves on the
//! rest (the discrete `D_β`). Since `A` is a Stieltjes matrix and `t ↦ t^q` is
//! increasing, discrete comparison holds, `u_β` decreases as `β ↓ 0`, and every
//! `u_β` extended by `𝕂[ν]` is a supersolution for the next level. Newton
//! started from a supersolution of a convex monotone system decreases
//! monotonically, so the levels are warm-started.
//!
//! Picard iteration `v_{m+1} = 𝕂[ν] - 𝔾[v_m^q]` is antitone: even iterates
//! decrease from `𝕂[ν]`, odd ones increase from `𝕂[ν] - 𝔾[𝕂[ν]^q]`, and both
//! bracket the solution.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::geometry::{Field, Grid};
use crate::kernels::Kernels;
use crate::linalg::CsrMatrix;
use crate::linear::{weighted_l1, TestFunction, WeakResidual};
use crate::measures::BoundaryMeasure;
use crate::operator::{constrained_band, constrained_load};
use crate::spectral::HardyExponents;
use crate::trace::ladder;

mod probes;

pub use probes::*;

/// Exhaustion depth. The gap between `u_β` and the limit decays like
/// `β^{α+-α-}`; at `μ = 3/16` twenty-four halvings bring it near `1e-4`.
pub const DEFAULT_LEVELS: usize = 24;

/// Tolerance on claimed monotone sequences, relative to the sup of the
/// sequence's first term.
pub const MONOTONE_TOL: f64 = 1e-10;

/// How each exhaustion level is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerScheme {
    /// Damped Newton on `A u + M u^q = 0` in `D_β`.
    #[default]
    Newton,
    /// The monotone sequence `-Δu_n + u_n^q = μ/δ² u_{n-1}` from the
    /// `L_μ`-harmonic extension, each step by damped Newton.
    Monotone,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOptions {
    /// Exhaustion levels `β₀ 2^{-j}`, `j = 1..=levels`.
    pub levels: usize,
    pub scheme: InnerScheme,
    /// Newton stops when the update is below this fraction of `sup u`.
    pub newton_tol: f64,
    pub newton_max: usize,
    /// Monotone inner iteration stops at `sup|u_n - u_{n-1}| ≤ tol · sup u₀`.
    pub inner_tol: f64,
    pub inner_max: usize,
    pub picard: bool,
    /// Picard stops when successive iterates differ by less than this
    /// fraction in `L¹_{δ^{-α-}}`.
    pub picard_tol: f64,
    pub picard_max: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            levels: DEFAULT_LEVELS,
            scheme: InnerScheme::Newton,
            newton_tol: 1e-12,
            newton_max: 200,
            inner_tol: 1e-8,
            inner_max: 2000,
            picard: true,
            picard_tol: 1e-10,
            picard_max: 500,
        }
    }
}

/// `-L_μ u + u^q = 0`, `tr*(u) = ν`, on the kernels' grid.
#[derive(Debug, Clone)]
pub struct NonlinearProblem<'a> {
    pub kernels: &'a Kernels,
    pub q: f64,
    pub nu: BoundaryMeasure,
}

impl<'a> NonlinearProblem<'a> {
    /// Fails unless `q > 1`, `ν ≥ 0` is valid on the domain and the operator
    /// is positive definite.
    pub fn new(kernels: &'a Kernels, q: f64, nu: BoundaryMeasure) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(HardyError::Parameter(format!("q = {q} must be finite and above 1")));
        }
        nu.validate(kernels.grid().domain())?;
        kernels.operator().check_definite()?;
        Ok(Self { kernels, q, nu })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.kernels.grid()
    }

    pub fn mu(&self) -> f64 {
        self.kernels.mu()
    }

    pub fn exponents(&self) -> &HardyExponents<f64> {
        self.kernels.exponents()
    }

    pub fn q_crit(&self) -> f64 {
        self.exponents().q_crit
    }

    pub fn subcritical(&self) -> bool {
        self.q < self.q_crit()
    }
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn power(u: f64, q: f64) -> f64 {
    u.max(0.0).powf(q)
}

/// `A u + M u^q - load` on the free nodes, zero on fixed ones.
fn absorption_residual(
    matrix: &CsrMatrix<f64>,
    volumes: &[f64],
    fixed: &[bool],
    q: f64,
    load: &[f64],
    u: &[f64],
) -> Vec<f64> {
    let mut r = matrix.mul_vec(u);
    for i in 0..r.len() {
        r[i] = if fixed[i] {
            0.0
        } else {
            r[i] + volumes[i] * power(u[i], q) - load[i]
        };
    }
    r
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Residual at or below this fraction of the size of its terms is rounding.
const RESIDUAL_FLOOR: f64 = 1e-11;

/// `‖ |A||u| + M|u|^q + |load| ‖₂` over the free nodes.
fn residual_scale(matrix: &CsrMatrix<f64>, volumes: &[f64], fixed: &[bool], q: f64, load: &[f64], u: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..u.len() {
        if fixed[i] {
            continue;
        }
        let t: f64 = matrix.row(i).map(|(j, a)| (a * u[j]).abs()).sum::<f64>()
            + volumes[i] * power(u[i], q)
            + load[i].abs();
        s += t * t;
    }
    s.sqrt()
}

/// Damped Newton for `A u + M u^q = load` on the free nodes with `u` fixed at
/// `start` on the `fixed` nodes. The step is halved while the residual grows.
/// Returns the solution and the number of Newton steps.
pub fn absorption_newton(
    matrix: &CsrMatrix<f64>,
    volumes: &[f64],
    fixed: &[bool],
    q: f64,
    load: &[f64],
    start: Vec<f64>,
    tol: f64,
    max_steps: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = start.len();
    let mut u = start;
    let mut r = absorption_residual(matrix, volumes, fixed, q, load, &u);
    let mut rn = norm2(&r);
    let mut trace = vec![rn];
    for step in 1..=max_steps {
        let extra: Vec<f64> = (0..n).map(|i| q * volumes[i] * power(u[i], q - 1.0)).collect();
        let ldl = constrained_band(matrix, fixed, Some(&extra)).factorize()?;
        let mut s: Vec<f64> = r.iter().map(|x| -x).collect();
        ldl.solve_in_place(&mut s);
        if sup_abs(&s) <= tol * sup_abs(&u) {
            // At rounding level the residual need not decrease.
            for (a, b) in u.iter_mut().zip(&s) {
                *a += b;
            }
            return Ok((u, step));
        }
        let mut lambda = 1.0;
        let (next, next_r, next_rn) = loop {
            let cand: Vec<f64> = u.iter().zip(&s).map(|(a, b)| a + lambda * b).collect();
            let cr = absorption_residual(matrix, volumes, fixed, q, load, &cand);
            let cn = norm2(&cr);
            if cn <= rn || lambda < 1e-3 {
                break (cand, cr, cn);
            }
            lambda *= 0.5;
        };
        if next_rn > rn && lambda < 1e-3 {
            if rn <= RESIDUAL_FLOOR * residual_scale(matrix, volumes, fixed, q, load, &u) {
                return Ok((u, step));
            }
            return Err(HardyError::Convergence {
                method: "damped Newton",
                iterations: step,
                last: next_rn,
                trace,
            });
        }
        let update = lambda * sup_abs(&s);
        u = next;
        r = next_r;
        rn = next_rn;
        trace.push(rn);
        if update <= tol * sup_abs(&u) || rn == 0.0 {
            return Ok((u, step));
        }
    }
    Err(HardyError::Convergence {
        method: "damped Newton",
        iterations: max_steps,
        last: rn,
        trace,
    })
}

/// Nodes of the complement of the discrete `D_β`.
pub fn exhaustion_mask(grid: &Grid, beta: f64) -> Vec<bool> {
    grid.deltas().iter().map(|&d| d <= beta).collect()
}

/// Largest positive entry of `next - prev`.
fn increase(prev: &[f64], next: &[f64]) -> f64 {
    prev.iter().zip(next).map(|(a, b)| b - a).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct InnerSolve {
    #[serde(skip)]
    pub u: Vec<f64>,
    /// Monotone steps (or 1 for direct Newton).
    pub iterations: usize,
    pub newton_steps: usize,
    /// `max(u_n - u_{n-1})` over the sequence, relative to `sup u₀`.
    pub violation: f64,
}

/// Solves `-L_μ u + u^q = 0` on the free nodes with `u = h` on `fixed` by the
/// monotone sequence: `u₀` is `L_μ`-harmonic with data `h`, then
/// `K u_n + M u_n^q = W u_{n-1}` where `A = K - W` splits off the Hardy term.
pub fn inner_monotone(
    kernels: &Kernels,
    q: f64,
    fixed: &[bool],
    h: &[f64],
    load: &[f64],
    opts: &SolveOptions,
) -> Result<InnerSolve> {
    let op = kernels.operator();
    let a = op.matrix();
    let k = op.stiffness();
    let vol = op.grid().volumes();
    let n = h.len();
    let w: Vec<f64> = k.diagonal().iter().zip(a.diagonal()).map(|(x, y)| x - y).collect();
    let mut b = load.to_vec();
    constrained_load(a, fixed, h, &mut b);
    let u0 = constrained_band(a, fixed, None).factorize()?.solve(&b);
    let scale = sup_abs(&u0);
    if scale == 0.0 {
        return Ok(InnerSolve {
            u: u0,
            iterations: 0,
            newton_steps: 0,
            violation: 0.0,
        });
    }
    let mut u = u0;
    let mut violation = 0.0f64;
    let mut newton_steps = 0;
    for it in 1..=opts.inner_max {
        let rhs: Vec<f64> = (0..n).map(|i| if fixed[i] { 0.0 } else { w[i] * u[i] + load[i] }).collect();
        let (next, steps) = absorption_newton(k, vol, fixed, q, &rhs, u.clone(), opts.newton_tol, opts.newton_max)?;
        newton_steps += steps;
        let v = increase(&u, &next) / scale;
        violation = violation.max(v);
        if v > MONOTONE_TOL {
            return Err(HardyError::Monotonicity {
                stage: "inner monotone iteration",
                violation: v,
            });
        }
        let change = u.iter().zip(&next).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        u = next;
        if change <= opts.inner_tol * scale {
            return Ok(InnerSolve {
                u,
                iterations: it,
                newton_steps,
                violation,
            });
        }
    }
    Err(HardyError::Convergence {
        method: "monotone iteration",
        iterations: opts.inner_max,
        last: f64::NAN,
        trace: Vec::new(),
    })
}

/// Direct damped Newton on `D_β` from the supersolution `start`.
fn inner_newton(
    kernels: &Kernels,
    q: f64,
    fixed: &[bool],
    start: Vec<f64>,
    load: &[f64],
    opts: &SolveOptions,
) -> Result<InnerSolve> {
    let op = kernels.operator();
    let (u, steps) = absorption_newton(
        op.matrix(),
        op.grid().volumes(),
        fixed,
        q,
        load,
        start,
        opts.newton_tol,
        opts.newton_max,
    )?;
    Ok(InnerSolve {
        u,
        iterations: 1,
        newton_steps: steps,
        violation: 0.0,
    })
}

/// Inner solve on the exhaustion `D_β` with data `h` on the complement.
pub fn inner_monotone_solve(kernels: &Kernels, q: f64, beta: f64, h: &Field, opts: &SolveOptions) -> Result<InnerSolve> {
    let grid = kernels.grid();
    grid.check_field(h)?;
    grid.domain().exhaustion(beta)?;
    if h.min_value() < 0.0 {
        return Err(HardyError::Parameter("exhaustion data must be nonnegative".into()));
    }
    let load = vec![0.0; grid.len()];
    inner_monotone(kernels, q, &exhaustion_mask(grid, beta), h.values(), &load, opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub beta: f64,
    pub free_nodes: usize,
    pub iterations: usize,
    pub newton_steps: usize,
    pub inner_violation: f64,
    /// `‖u_β‖_{L¹_{δ^{-α-}}}`.
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardReport {
    pub iterations: usize,
    pub converged: bool,
    /// A negative iterate was clamped at zero.
    pub clamped: bool,
    /// Weight `ω` of the accepted run.
    pub relaxation: f64,
    pub attempts: usize,
    /// Successive differences in `L¹_{δ^{-α-}}`, relative.
    pub history: Vec<f64>,
    /// Largest increase along the even (decreasing) iterates and largest
    /// decrease along the odd (increasing) ones, relative to `sup 𝕂[ν]`.
    pub bracket_violation: f64,
    /// `‖v - u‖_{L¹_{δ^{-α-}}} / ‖u‖_{L¹_{δ^{-α-}}}` against the exhaustion limit.
    pub agreement: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub mu: f64,
    pub q: f64,
    pub q_crit: f64,
    pub subcritical: bool,
    pub scheme: InnerScheme,
    pub levels: Vec<LevelReport>,
    /// Largest increase of `u_β` as `β` decreases, relative to `sup 𝕂[ν]`.
    pub outer_violation: f64,
    pub inner_violation: f64,
    /// `‖u_{β_J} - u_{β_{J-1}}‖ / (2^{α+-α-} - 1)`, relative to `‖u_{β_J}‖`.
    pub exhaustion_error: f64,
    pub picard: Option<PicardReport>,
    /// `‖u + 𝔾[u^q] - 𝕂[ν]‖ / ‖𝕂[ν]‖` in `L¹_{δ^{-α-}}`.
    pub identity_residual: f64,
    /// `max(u - 𝕂[ν])`, relative to `sup 𝕂[ν]`.
    pub domination_violation: f64,
    pub norm_l1: f64,
    pub norm_lq: f64,
    pub data_norm: f64,
    /// `(‖u‖_{L¹_{δ^{-α-}}} + ‖u‖_{L^q_{δ^{α+}}}) / ‖ν‖`.
    pub apriori_ratio: f64,
    /// `‖𝕂[ν]‖_{L^q_{δ^{α+}}}` and whether its dyadic layers fail to decay.
    pub martin_lq: f64,
    pub martin_lq_growing: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct NonlinearSolution {
    pub u: Field,
    pub martin: Field,
    /// `u_β` for every level, extended by `𝕂[ν]`.
    pub ladder: Vec<Field>,
    pub picard: Option<Field>,
    pub report: SolveReport,
}

/// `(∫ |u|^q δ^{α+} dx)^{1/q}`.
pub fn lq_norm(u: &Field, q: f64, alpha_plus: f64) -> f64 {
    u.weighted_norm(q, alpha_plus)
}

/// Contributions of the dyadic layers `β₀2^{-j-1} < δ ≤ β₀2^{-j}` to
/// `∫ |f|^q δ^a dx`, `j = 0..layers`.
pub fn dyadic_layers(f: &Field, q: f64, a: f64, layers: usize) -> Vec<f64> {
    let grid = f.grid();
    let beta0 = grid.domain().beta0;
    let mut out = vec![0.0; layers];
    for ((v, w), d) in f.values().iter().zip(grid.volumes()).zip(grid.deltas()) {
        if *d > beta0 {
            continue;
        }
        let j = (beta0 / d).log2().floor() as usize;
        if j < layers {
            out[j] += v.abs().powf(q) * d.powf(a) * w;
        }
    }
    out
}

/// The dyadic layers of `𝕂[ν]` in `L^q_{δ^{α+}}` fail to decay geometrically
/// over the resolved layers.
fn layers_growing(layers: &[f64]) -> bool {
    let tail: Vec<f64> = layers.iter().copied().filter(|v| *v > 0.0).collect();
    if tail.len() < 4 {
        return false;
    }
    let half = tail.len() / 2;
    let first: f64 = tail[..half].iter().sum::<f64>() / half as f64;
    let last: f64 = tail[tail.len() - half..].iter().sum::<f64>() / half as f64;
    last >= first
}

/// Relaxation weights tried in turn by [`picard`].
pub const PICARD_WEIGHTS: [f64; 7] = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625];

struct PicardRun {
    v: Vec<f64>,
    iterations: usize,
    converged: bool,
    clamped: bool,
    history: Vec<f64>,
    bracket: f64,
}

fn picard_run(kernels: &Kernels, martin: &Field, q: f64, start: &[f64], omega: f64, opts: &SolveOptions) -> Result<PicardRun> {
    let grid = kernels.grid();
    let am = kernels.exponents().alpha_minus;
    let vol = grid.volumes();
    let scale = martin.max_abs();
    let kn = weighted_l1(martin, -am).max(f64::MIN_POSITIVE);
    let mut run = PicardRun {
        v: start.to_vec(),
        iterations: 0,
        converged: false,
        clamped: false,
        history: Vec::new(),
        bracket: 0.0,
    };
    let mut prev_even: Option<Vec<f64>> = None;
    let mut prev_odd: Option<Vec<f64>> = None;
    for m in 1..=opts.picard_max {
        let f: Vec<f64> = run.v.iter().zip(vol).map(|(x, w)| power(*x, q) * w).collect();
        let g = kernels.solve(&f)?;
        let mut next: Vec<f64> = martin
            .values()
            .iter()
            .zip(&g)
            .zip(&run.v)
            .map(|((k, g), v)| (1.0 - omega) * v + omega * (k - g))
            .collect();
        for x in next.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
                run.clamped = true;
            }
        }
        let diff = Field::new(grid, next.iter().zip(&run.v).map(|(a, b)| a - b).collect())?;
        let d = weighted_l1(&diff, -am) / kn;
        run.history.push(d);
        if omega == 1.0 {
            // Even iterates decrease, odd ones increase.
            let slot = if m % 2 == 0 { &mut prev_even } else { &mut prev_odd };
            if let Some(p) = slot.as_ref() {
                let v = if m % 2 == 0 { increase(p, &next) } else { increase(&next, p) };
                run.bracket = run.bracket.max(v / scale);
            }
            *slot = Some(next.clone());
        }
        run.v = next;
        run.iterations = m;
        if d <= opts.picard_tol {
            run.converged = true;
            break;
        }
        let n = run.history.len();
        let diverging = !d.is_finite() || (n > 4 && run.history[n - 4..].windows(2).all(|w| w[1] > w[0]));
        if diverging || run.clamped {
            break;
        }
    }
    Ok(run)
}

/// `v_{m+1} = (1 - ω) v_m + ω(𝕂[ν] - 𝔾[v_m^q])` from `start`. Plain Picard
/// (`ω = 1`) is tried first; a run that diverges or leaves the positive cone
/// is restarted with the next weight of [`PICARD_WEIGHTS`]. The bracket
/// check applies to plain runs only.
pub fn picard(kernels: &Kernels, martin: &Field, q: f64, start: &Field, opts: &SolveOptions) -> Result<(Field, PicardReport)> {
    let grid = kernels.grid();
    let mut attempts = 0;
    let mut last = None;
    for &omega in &PICARD_WEIGHTS {
        attempts += 1;
        let run = picard_run(kernels, martin, q, start.values(), omega, opts)?;
        let done = run.converged;
        last = Some((omega, run));
        if done {
            break;
        }
    }
    let (omega, run) = last.expect("at least one weight");
    Ok((
        Field::new(grid, run.v)?,
        PicardReport {
            iterations: run.iterations,
            converged: run.converged,
            clamped: run.clamped,
            relaxation: omega,
            attempts,
            history: run.history,
            bracket_violation: run.bracket,
            agreement: f64::NAN,
        },
    ))
}

/// `‖u + 𝔾[u^q] - 𝕂[ν]‖ / ‖𝕂[ν]‖` in `L¹_{δ^{-α-}}`.
pub fn identity_residual(kernels: &Kernels, u: &Field, martin: &Field, q: f64) -> Result<f64> {
    let am = kernels.exponents().alpha_minus;
    let f: Vec<f64> = u.values().iter().map(|x| power(*x, q)).collect();
    let g = Field::new(kernels.grid(), kernels.greens_potential_density(&f)?)?;
    let r = u.add(&g)?.sub(martin)?;
    let kn = weighted_l1(martin, -am);
    let rn = weighted_l1(&r, -am);
    Ok(if kn > 0.0 { rn / kn } else { rn })
}

/// Exhaustion along `β₀2^{-j}`, then Picard as an independent check.
pub fn solve_moderate(problem: &NonlinearProblem, opts: &SolveOptions) -> Result<NonlinearSolution> {
    let kernels = problem.kernels;
    let grid = kernels.grid();
    let e = *problem.exponents();
    let q = problem.q;
    let load = kernels.martin_load(&problem.nu)?;
    let martin = Field::new(grid, kernels.solve(&load)?)?;
    let scale = martin.max_abs();
    let betas = ladder(grid.domain().beta0, opts.levels);
    let mut warnings = Vec::new();
    let layers = dyadic_layers(&martin, q, e.alpha_plus, 40);
    let martin_lq_growing = layers_growing(&layers);
    if martin_lq_growing {
        warnings.push("K[nu] is not certified in L^q with weight delta^alpha+".to_string());
    }

    let mut levels = Vec::new();
    let mut fields: Vec<Field> = Vec::new();
    let mut current = martin.values().to_vec();
    let mut outer = 0.0f64;
    let mut inner = 0.0f64;
    for &beta in &betas {
        let fixed = exhaustion_mask(grid, beta);
        let start: Vec<f64> = current
            .iter()
            .zip(martin.values())
            .zip(&fixed)
            .map(|((c, k), f)| if *f { *k } else { *c })
            .collect();
        let solve = match opts.scheme {
            InnerScheme::Newton => inner_newton(kernels, q, &fixed, start, &load, opts)?,
            InnerScheme::Monotone => inner_monotone(kernels, q, &fixed, &start, &load, opts)?,
        };
        if scale > 0.0 {
            let v = increase(&current, &solve.u) / scale;
            outer = outer.max(v);
            if v > MONOTONE_TOL {
                return Err(HardyError::Monotonicity {
                    stage: "exhaustion ladder",
                    violation: v,
                });
            }
        }
        inner = inner.max(solve.violation);
        let field = Field::new(grid, solve.u.clone())?;
        levels.push(LevelReport {
            beta,
            free_nodes: fixed.iter().filter(|f| !**f).count(),
            iterations: solve.iterations,
            newton_steps: solve.newton_steps,
            inner_violation: solve.violation,
            norm: weighted_l1(&field, -e.alpha_minus),
        });
        current = solve.u;
        fields.push(field);
    }
    let u = fields.last().cloned().unwrap_or_else(|| martin.clone());
    let un = weighted_l1(&u, -e.alpha_minus);
    let exhaustion_error = if fields.len() >= 2 && un > 0.0 {
        let d = fields[fields.len() - 1].sub(&fields[fields.len() - 2])?;
        weighted_l1(&d, -e.alpha_minus) / (2f64.powf(e.alpha_plus - e.alpha_minus) - 1.0) / un
    } else {
        0.0
    };

    let (picard_field, picard_report) = if opts.picard && scale > 0.0 {
        let (v, mut rep) = picard(kernels, &martin, q, &martin, opts)?;
        rep.agreement = if un > 0.0 {
            weighted_l1(&v.sub(&u)?, -e.alpha_minus) / un
        } else {
            0.0
        };
        if rep.clamped {
            if problem.subcritical() {
                warnings.push("Picard iterate clamped at zero in the subcritical regime".to_string());
            } else {
                warnings.push("Picard iterate clamped at zero".to_string());
            }
        }
        if !rep.converged {
            warnings.push(format!("Picard did not converge in {} iterations", rep.iterations));
        }
        (Some(v), Some(rep))
    } else {
        (None, None)
    };

    let identity = identity_residual(kernels, &u, &martin, q)?;
    let domination = if scale > 0.0 {
        increase(martin.values(), u.values()) / scale
    } else {
        0.0
    };
    let norm_l1 = un;
    let norm_lq = lq_norm(&u, q, e.alpha_plus);
    let data_norm = problem.nu.total_variation(grid.domain());
    let report = SolveReport {
        mu: problem.mu(),
        q,
        q_crit: e.q_crit,
        subcritical: problem.subcritical(),
        scheme: opts.scheme,
        levels,
        outer_violation: outer,
        inner_violation: inner,
        exhaustion_error,
        picard: picard_report,
        identity_residual: identity,
        domination_violation: domination,
        norm_l1,
        norm_lq,
        data_norm,
        apriori_ratio: if data_norm > 0.0 { (norm_l1 + norm_lq) / data_norm } else { 0.0 },
        martin_lq: lq_norm(&martin, q, e.alpha_plus),
        martin_lq_growing,
        warnings,
    };
    Ok(NonlinearSolution {
        u,
        martin,
        ladder: fields,
        picard: picard_field,
        report,
    })
}

/// Residual of `∫(-u L_μζ + u^q ζ) dx = -∫ 𝕂[ν] L_μζ dx`.
pub fn verify_weak_form(kernels: &Kernels, u: &Field, martin: &Field, q: f64, zeta: &TestFunction) -> Result<WeakResidual> {
    let grid = kernels.grid();
    grid.check_field(u)?;
    grid.check_field(martin)?;
    grid.check_field(&zeta.field)?;
    let vol = grid.volumes();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..grid.len() {
        let (ui, l, z) = (u.values()[i], zeta.minus_l.values()[i], zeta.field.values()[i]);
        lhs += vol[i] * (ui * l + power(ui, q) * z);
        rhs += vol[i] * martin.values()[i] * l;
    }
    let absolute = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs());
    Ok(WeakResidual {
        lhs,
        rhs,
        absolute,
        relative: if scale > 0.0 { absolute / scale } else { 0.0 },
    })
}

/// `max(lower - upper)` relative to `sup |upper|`; zero when the order holds.
pub fn order_violation(lower: &Field, upper: &Field) -> Result<f64> {
    lower.same_grid(upper)?;
    let scale = upper.max_abs();
    let v = increase(upper.values(), lower.values());
    Ok(if scale > 0.0 { v / scale } else { v })
}
