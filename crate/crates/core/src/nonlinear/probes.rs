//! Experiments with Dirac boundary data `ν = kδ_y`: the boundary profile of
//! subcritical solutions, the cone integral that separates the sub- and
//! supercritical ranges, interior saturation in `k`, and continuity under
//! weak convergence of the data.

use std::f64::consts::PI;

use serde::Serialize;

use super::{lq_norm, solve_moderate, NonlinearProblem, NonlinearSolution, SolveOptions, SolveReport};
use crate::error::{HardyError, Result};
use crate::geometry::{DomainKind, Field, Point};
use crate::kernels::{pole_radius, Kernels};
use crate::linear::weighted_l1;
use crate::measures::BoundaryMeasure;
use crate::spectral::least_squares_slope;
use crate::trace::{ladder, trace_mass};

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Solution of the absorption problem for `ν` with the given options.
pub fn solve_for(kernels: &Kernels, q: f64, nu: BoundaryMeasure, opts: &SolveOptions) -> Result<NonlinearSolution> {
    solve_moderate(&NonlinearProblem::new(kernels, q, nu)?, opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct DiracProfile {
    pub q: f64,
    pub k: f64,
    pub y: Point,
    /// Depths of the sampled nodes on the normal through `y`, decreasing.
    pub depths: Vec<f64>,
    pub distances: Vec<f64>,
    /// `u / (k K(·, y))`.
    pub ratios: Vec<f64>,
    /// The ratios do not decrease toward `y`.
    pub increasing: bool,
    pub finest_ratio: f64,
    /// `θ = N + α+ - q(N - 1 - α-)`.
    pub bound_exponent: f64,
    /// Slope of `ln(𝔾[u^q]/K)` against `ln|x - y|`.
    pub fitted_exponent: Option<f64>,
    /// `max 𝔾[u^q]/(k^q K |x - y|^θ)` over the samples.
    pub bound_constant: f64,
    pub solve: SolveReport,
}

/// `u_{kδ_y}/(k K(·, y))` at the nodes of the normal through `y` nearest to
/// the depths `β₀ 2^{-j}`, `j = 1..=samples`.
pub fn dirac_profile(
    kernels: &Kernels,
    q: f64,
    k: f64,
    y: Point,
    samples: usize,
    opts: &SolveOptions,
) -> Result<(DiracProfile, NonlinearSolution)> {
    let e = *kernels.exponents();
    if !(q < e.q_crit) {
        return Err(HardyError::Parameter(format!(
            "Dirac profile needs q < q_crit = {}, got {q}",
            e.q_crit
        )));
    }
    let grid = kernels.grid();
    let sol = solve_for(kernels, q, BoundaryMeasure::dirac(y, k), opts)?;
    let ray = &grid.rays()[grid.nearest_ray(y)];
    let pole = ray.boundary;
    let n = grid.domain().ambient_dim as f64;
    let theta = n + e.alpha_plus - q * (n - 1.0 - e.alpha_minus);
    let mut depths = Vec::new();
    let mut distances = Vec::new();
    let mut ratios = Vec::new();
    let mut bound_constant = 0.0f64;
    let mut logs = (Vec::new(), Vec::new());
    for beta in ladder(grid.domain().beta0, samples) {
        let node = *ray
            .nodes
            .iter()
            .min_by(|&&a, &&b| (grid.deltas()[a] - beta).abs().total_cmp(&(grid.deltas()[b] - beta).abs()))
            .expect("ray has nodes");
        if depths.last() == Some(&grid.deltas()[node]) {
            continue;
        }
        // 𝕂[kδ_y] = k K(·, y) on the grid.
        let kk = sol.martin.values()[node];
        let ratio = sol.u.values()[node] / kk;
        let r = dist(grid.coords()[node], pole);
        let green_over_k = k * (1.0 - ratio);
        bound_constant = bound_constant.max(green_over_k / (k.powf(q) * r.powf(theta)));
        if green_over_k > 0.0 {
            logs.0.push(r.ln());
            logs.1.push(green_over_k.ln());
        }
        depths.push(grid.deltas()[node]);
        distances.push(r);
        ratios.push(ratio);
    }
    let increasing = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let profile = DiracProfile {
        q,
        k,
        y: pole,
        finest_ratio: *ratios.last().unwrap_or(&f64::NAN),
        depths,
        distances,
        ratios,
        increasing,
        bound_exponent: theta,
        fitted_exponent: least_squares_slope(&logs.0, &logs.1),
        bound_constant,
        solve: sol.report.clone(),
    };
    Ok((profile, sol))
}

/// Fraction of the boundary cell of `ray` lying in the cone
/// `γ|x - y| ≤ δ(x)` at the depth of `x`, measured in the boundary parameter.
fn cone_fraction(kernels: &Kernels, x: Point, delta: f64, ray: &crate::geometry::Ray, y: Point, gamma: f64) -> f64 {
    let domain = kernels.grid().domain();
    let w = ray.width;
    let (offset, half) = match domain.kind {
        DomainKind::Disk { radius } => {
            let c = domain.center();
            let r = dist(x, c);
            if r == 0.0 {
                return 0.0;
            }
            let ty = (y[1] - c[1]).atan2(y[0] - c[0]);
            let reach = delta / gamma;
            let cos_max = (r * r + radius * radius - reach * reach) / (2.0 * r * radius);
            let half = if cos_max <= -1.0 {
                PI
            } else if cos_max >= 1.0 {
                return 0.0;
            } else {
                cos_max.acos()
            };
            let d = (ray.param - ty + PI).rem_euclid(2.0 * PI) - PI;
            (d, half)
        }
        DomainKind::HalfspaceBox { .. } => {
            let half = delta * (1.0 / (gamma * gamma) - 1.0).max(0.0).sqrt();
            (ray.param - y[1], half)
        }
    };
    let lo = (offset - w / 2.0).max(-half);
    let hi = (offset + w / 2.0).min(half);
    ((hi - lo) / w).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceDecay {
    pub betas: Vec<f64>,
    /// `M(β)` of the exhaustion limit.
    pub masses: Vec<f64>,
    /// `k M(β)` of `K(·, y)`.
    pub reference: Vec<f64>,
    pub ratios: Vec<f64>,
    pub decreasing: bool,
    pub final_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupercriticalReport {
    pub q: f64,
    pub q_crit: f64,
    pub gamma: f64,
    pub r0: f64,
    /// Lateral width of the pole's boundary cell. Below it the discrete
    /// kernel no longer resolves the singularity at `y`, so the ladder stops.
    pub resolution_limit: f64,
    pub rhos: Vec<f64>,
    /// `J_γ(ρ) = ∫_{C_γ(y), ρ ≤ |x-y| < r₀} K^q δ^{α+} dx`.
    pub integrals: Vec<f64>,
    /// `J_γ(ρ_{i+1}) / J_γ(ρ_i)`.
    pub growth: Vec<f64>,
    /// `J_γ(ρ) ~ ρ^e` with `e = N + α+ - q(N - 1 - α-)` when `e < 0`.
    pub exponent: f64,
    /// Limit of the growth factor: `2^{-e}` if `e < 0`, else 1.
    pub asymptotic_growth: f64,
    pub fitted_exponent: Option<f64>,
    pub trace: Option<TraceDecay>,
}

/// Truncated cone integrals `J_γ(ρ)` for `ρ = r₀ 2^{-i}`, `i = 1..=halvings`,
/// stopping before `ρ` falls below `rho_min`. Cells straddling the cone's
/// edge count with the fraction of their lateral extent inside it.
pub fn cone_integrals(
    kernels: &Kernels,
    q: f64,
    y: Point,
    gamma: f64,
    r0: f64,
    halvings: usize,
    rho_min: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(HardyError::Range {
            what: "gamma",
            value: gamma,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let grid = kernels.grid();
    let ap = kernels.exponents().alpha_plus;
    let column = kernels.martin_column(y)?;
    let pole = grid.rays()[grid.nearest_ray(y)].boundary;
    let rhos: Vec<f64> = (1..=halvings)
        .map(|i| r0 * 0.5f64.powi(i as i32))
        .take_while(|r| *r >= rho_min)
        .collect();
    if rhos.len() < 2 {
        return Err(HardyError::Parameter(format!(
            "cone ladder from r0 = {r0} has fewer than two cutoffs above {rho_min}"
        )));
    }
    let mut integrals = vec![0.0; rhos.len()];
    for ray in grid.rays() {
        for &i in &ray.nodes {
            let x = grid.coords()[i];
            let r = dist(x, pole);
            if r >= r0 || r < rhos[rhos.len() - 1] {
                continue;
            }
            let d = grid.deltas()[i];
            let f = cone_fraction(kernels, x, d, ray, pole, gamma);
            if f == 0.0 {
                continue;
            }
            let c = f * column.field.values()[i].powf(q) * d.powf(ap) * grid.volumes()[i];
            for (j, rho) in rhos.iter().enumerate() {
                if r >= *rho {
                    integrals[j] += c;
                }
            }
        }
    }
    Ok((rhos, integrals))
}

/// Cone integrals over the resolved cutoffs plus, optionally, the normalized mass of the exhaustion
/// limit for `ν = kδ_y` against `k` times that of `K(·, y)`.
#[allow(clippy::too_many_arguments)]
pub fn supercritical_probe(
    kernels: &Kernels,
    q: f64,
    y: Point,
    gamma: f64,
    halvings: usize,
    k: Option<f64>,
    trace_levels: usize,
    opts: &SolveOptions,
) -> Result<SupercriticalReport> {
    let grid = kernels.grid();
    let e = *kernels.exponents();
    let r0 = grid.domain().beta0;
    let resolution_limit = pole_radius(grid, y);
    let (rhos, integrals) = cone_integrals(kernels, q, y, gamma, r0, halvings, resolution_limit)?;
    let growth: Vec<f64> = integrals.windows(2).map(|w| w[1] / w[0]).collect();
    let n = grid.domain().ambient_dim as f64;
    let exponent = n + e.alpha_plus - q * (n - 1.0 - e.alpha_minus);
    let half = rhos.len() / 2;
    let fitted_exponent = least_squares_slope(
        &rhos[half..].iter().map(|r| r.ln()).collect::<Vec<_>>(),
        &integrals[half..].iter().map(|v| v.ln()).collect::<Vec<_>>(),
    );
    let trace = match k {
        None => None,
        Some(k) => {
            let sol = solve_for(kernels, q, BoundaryMeasure::dirac(y, k), opts)?;
            let betas = ladder(grid.domain().beta0, trace_levels);
            let mut masses = Vec::new();
            let mut reference = Vec::new();
            for &b in &betas {
                masses.push(trace_mass(&sol.u, e.alpha_minus, b)?);
                reference.push(trace_mass(&sol.martin, e.alpha_minus, b)?);
            }
            let ratios: Vec<f64> = masses.iter().zip(&reference).map(|(m, r)| m / r).collect();
            Some(TraceDecay {
                decreasing: ratios.windows(2).all(|w| w[1] <= w[0]),
                final_ratio: *ratios.last().unwrap_or(&f64::NAN),
                betas,
                masses,
                reference,
                ratios,
            })
        }
    };
    Ok(SupercriticalReport {
        q,
        q_crit: e.q_crit,
        gamma,
        r0,
        resolution_limit,
        rhos,
        integrals,
        growth,
        exponent,
        asymptotic_growth: if exponent < 0.0 { 2f64.powf(-exponent) } else { 1.0 },
        fitted_exponent,
        trace,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KellerOssermanReport {
    pub q: f64,
    pub center: Point,
    pub radius: f64,
    pub ks: Vec<f64>,
    /// `max u_{kδ_y}` over the ball.
    pub maxima: Vec<f64>,
    /// Relative change of the maximum per doubling of `k`.
    pub increments: Vec<f64>,
    pub increasing: bool,
    pub last_increment: f64,
}

/// Largest value of `u` over the nodes of the closed ball.
pub fn ball_max(u: &Field, center: Point, radius: f64) -> f64 {
    u.grid()
        .coords()
        .iter()
        .zip(u.values())
        .filter(|(c, _)| dist(**c, center) <= radius)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Interior maxima of `u_{kδ_y}` for `k = k₀ 2^i`, `i = 0..doublings`.
pub fn keller_osserman_probe(
    kernels: &Kernels,
    q: f64,
    y: Point,
    k0: f64,
    doublings: usize,
    radius: f64,
    opts: &SolveOptions,
) -> Result<KellerOssermanReport> {
    let center = kernels.grid().domain().center();
    let mut ks = Vec::new();
    let mut maxima = Vec::new();
    for i in 0..doublings {
        let k = k0 * 2f64.powi(i as i32);
        let sol = solve_for(kernels, q, BoundaryMeasure::dirac(y, k), opts)?;
        ks.push(k);
        maxima.push(ball_max(&sol.u, center, radius));
    }
    let increments: Vec<f64> = maxima.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect();
    Ok(KellerOssermanReport {
        q,
        center,
        radius,
        increasing: increments.iter().all(|d| *d >= 0.0),
        last_increment: *increments.last().unwrap_or(&f64::NAN),
        ks,
        maxima,
        increments,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub q: f64,
    pub widths: Vec<f64>,
    /// `‖u_{ν_n} - u_ν‖_{L¹_{δ^{-α-}}} / ‖u_ν‖_{L¹_{δ^{-α-}}}`.
    pub l1_gaps: Vec<f64>,
    /// `‖u_{ν_n}^q - u_ν^q‖_{L¹_{δ^{α+}}} / ‖u_ν^q‖_{L¹_{δ^{α+}}}`.
    pub lq_gaps: Vec<f64>,
    pub decreasing: bool,
    pub final_gap: f64,
}

/// Solutions for mollified Diracs of shrinking width against the solution
/// for the Dirac itself.
pub fn stability_ladder(
    kernels: &Kernels,
    q: f64,
    s0: f64,
    mass: f64,
    widths: &[f64],
    pieces: usize,
    opts: &SolveOptions,
) -> Result<StabilityReport> {
    let grid = kernels.grid();
    let domain = grid.domain();
    let e = *kernels.exponents();
    let y = domain.boundary_point(s0);
    let target = solve_for(kernels, q, BoundaryMeasure::dirac(y, mass), opts)?.u;
    let tq = target.map(|v| v.max(0.0).powf(q));
    let (tn, tqn) = (weighted_l1(&target, -e.alpha_minus), weighted_l1(&tq, e.alpha_plus));
    let mut l1_gaps = Vec::new();
    let mut lq_gaps = Vec::new();
    for &w in widths {
        let nu = BoundaryMeasure::mollified_dirac(domain, s0, w, mass, pieces);
        let u = solve_for(kernels, q, nu, opts)?.u;
        l1_gaps.push(weighted_l1(&u.sub(&target)?, -e.alpha_minus) / tn);
        let uq = u.map(|v| v.max(0.0).powf(q));
        lq_gaps.push(weighted_l1(&uq.sub(&tq)?, e.alpha_plus) / tqn);
    }
    let decreasing = l1_gaps.windows(2).all(|w| w[1] < w[0]) && lq_gaps.windows(2).all(|w| w[1] < w[0]);
    let final_gap = l1_gaps.last().copied().unwrap_or(f64::NAN).max(lq_gaps.last().copied().unwrap_or(f64::NAN));
    Ok(StabilityReport {
        q,
        widths: widths.to_vec(),
        l1_gaps,
        lq_gaps,
        decreasing,
        final_gap,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AprioriReport {
    pub q: f64,
    pub scales: Vec<f64>,
    /// `(‖u‖_{L¹_{δ^{-α-}}} + ‖u‖_{L^q_{δ^{α+}}}) / ‖ν‖`.
    pub ratios: Vec<f64>,
    /// `max / min` of the ratios.
    pub spread: f64,
}

/// The a-priori ratio for `c ν` over the given scales `c`.
pub fn apriori_scan(kernels: &Kernels, q: f64, shape: &BoundaryMeasure, scales: &[f64], opts: &SolveOptions) -> Result<AprioriReport> {
    let e = *kernels.exponents();
    let mut ratios = Vec::new();
    for &c in scales {
        let nu = shape.scaled(c);
        let m = nu.total_variation(kernels.grid().domain());
        let u = solve_for(kernels, q, nu, opts)?.u;
        ratios.push((weighted_l1(&u, -e.alpha_minus) + lq_norm(&u, q, e.alpha_plus)) / m);
    }
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(AprioriReport {
        q,
        scales: scales.to_vec(),
        ratios,
        spread: max / min,
    })
}
