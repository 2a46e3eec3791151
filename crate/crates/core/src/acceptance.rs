//! The acceptance suite: twelve numbered criteria, each a list of named checks
//! against fixed thresholds. Shared by the `acceptance` test target and the
//! `verify-all` subcommand.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{DomainSpec, Grid, GridOptions, Point};
use crate::kernels::{self, Kernels};
use crate::linear::{make_test_functions, solve_linear, weak_residual};
use crate::measures::{BoundaryDensity, BoundaryMeasure, InteriorMeasure};
use crate::nonlinear::{self, InnerScheme, SolveOptions};
use crate::regularizing::{standard_families, verify_regularizing_estimates};
use crate::spectral::{self, boundary_exponent_fit, default_window};
use crate::trace::{self, Verdict};
use crate::weaklp::{weak_norm, weak_quasinorm};

/// `j₀,₁²`, the first Dirichlet eigenvalue of the unit disk.
pub const BESSEL_J01_SQUARED: f64 = 5.783_185_962_946_784;

/// Criteria whose thresholds this discretization cannot reach, with the reason.
/// They are reported as failures; the test target does not assert them.
pub const KNOWN_LIMITS: &[(usize, &str)] = &[(
    11,
    "trace mass of the q = 4 exhaustion limit decays like β^{1/12}; \
     ≤ 0.1 of the reference needs β far below any representable level",
)];

pub fn known_limit(id: usize) -> Option<&'static str> {
    KNOWN_LIMITS.iter().find(|(i, _)| *i == id).map(|(_, r)| *r)
}

/// Resolutions and sampling for one run of the suite.
#[derive(Debug, Clone, Serialize, serde::Deserialize, PartialEq)]
pub struct Preset {
    pub name: String,
    pub mu: f64,
    /// Grids for the linear criteria.
    pub resolution: usize,
    /// Coarser grid for the resolution-growth comparisons.
    pub coarse_resolution: usize,
    /// Grid for the dense eigenvalue oracle.
    pub dense_resolution: usize,
    /// Grid for the semilinear criteria.
    pub nonlinear_resolution: usize,
    /// Grid for the mollified-Dirac ladder; `stability_lateral` boundary cells.
    pub stability_resolution: usize,
    pub stability_lateral: usize,
    pub stability_widths: Vec<f64>,
    pub seed: u64,
}

impl Preset {
    /// Full suite: unit disk, `μ = 3/16`, resolution 128.
    pub fn desk() -> Self {
        Self {
            name: "desk".into(),
            mu: 0.1875,
            resolution: 128,
            coarse_resolution: 96,
            dense_resolution: 32,
            nonlinear_resolution: 64,
            stability_resolution: 64,
            stability_lateral: 256,
            stability_widths: vec![0.5, 0.25, 0.125, 0.0625, 0.03125],
            seed: 20240611,
        }
    }

    /// Small grids for plumbing checks; thresholds are not expected to hold.
    pub fn smoke() -> Self {
        Self {
            name: "smoke".into(),
            mu: 0.1875,
            resolution: 32,
            coarse_resolution: 24,
            dense_resolution: 12,
            nonlinear_resolution: 24,
            stability_resolution: 24,
            stability_lateral: 24,
            stability_widths: vec![1.0, 0.5],
            seed: 1,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "desk" => Some(Self::desk()),
            "smoke" => Some(Self::smoke()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Measured value; `None` for wall-clock checks, which keeps reports
    /// byte-identical across runs.
    pub value: Option<f64>,
    pub target: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub known_limit: Option<&'static str>,
    pub error: Option<String>,
}

impl CriterionReport {
    /// `PASS`/`FAIL` line with the failing checks named.
    pub fn summary(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {:>2} {status}: {}", self.id, self.title);
        if let Some(e) = &self.error {
            line.push_str(&format!(" [error: {e}]"));
        }
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| match c.value {
                Some(v) => format!("{} = {v:.4e} (target {})", c.name, c.target),
                None => format!("{} (target {})", c.name, c.target),
            })
            .collect();
        if !failed.is_empty() {
            line.push_str(&format!(" [failed: {}]", failed.join("; ")));
        }
        if let (false, Some(r)) = (self.passed, self.known_limit) {
            line.push_str(&format!(" [known limit: {r}]"));
        }
        line
    }
}

pub const TITLES: [&str; 12] = [
    "Hardy constant",
    "principal eigenvalue",
    "eigenfunction boundary exponent",
    "Green and Martin estimates",
    "half-space oracle",
    "trace brackets",
    "weak L^p",
    "linear boundary problem",
    "subcritical semilinear problem",
    "Dirac asymptotics",
    "critical dichotomy",
    "stability",
];

struct Checks(Vec<Check>);

impl Checks {
    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, format!("<= {bound}"), value <= bound);
    }

    fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, format!(">= {bound}"), value >= bound);
    }

    fn within(&mut self, name: &str, value: f64, center: f64, tol: f64) {
        self.push(name, value, format!("{center} ± {tol}"), (value - center).abs() <= tol);
    }

    fn holds(&mut self, name: &str, ok: bool) {
        self.0.push(Check {
            name: name.into(),
            value: None,
            target: "true".into(),
            passed: ok,
        });
    }

    fn push(&mut self, name: &str, value: f64, target: String, passed: bool) {
        self.0.push(Check {
            name: name.into(),
            value: Some(value),
            target,
            passed: passed && value.is_finite(),
        });
    }
}

fn disk(res: usize) -> Result<Arc<Grid>> {
    Grid::new(DomainSpec::disk(1.0), GridOptions::graded(res))
}

fn unit_box(res: usize) -> Result<Arc<Grid>> {
    Grid::new(DomainSpec::halfspace_box(1.0, 1.0), GridOptions::graded(res))
}

const POLE: Point = [1.0, 0.0];

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(0.0, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn c1_hardy(p: &Preset, c: &mut Checks) -> Result<()> {
    for (label, make) in [("disk", disk as fn(usize) -> Result<Arc<Grid>>), ("box", unit_box)] {
        let t = Instant::now();
        let h = spectral::hardy_constant(&*make(p.resolution)?)?;
        c.holds(&format!("{label}: runtime under 30 s"), t.elapsed().as_secs_f64() < 30.0);
        c.within(&format!("{label}: discrete Hardy constant"), h.value, 0.25, 0.02);
        let small = make(p.dense_resolution)?;
        let sparse = spectral::hardy_constant(&small)?.value;
        let dense = spectral::hardy_constant_dense(&small)?;
        c.at_most(&format!("{label}: relative gap to dense oracle"), (sparse - dense).abs() / dense, 1e-8);
    }
    Ok(())
}

fn c2_eigenvalue(p: &Preset, c: &mut Checks) -> Result<()> {
    let g = disk(p.resolution)?;
    let e = spectral::principal_eigenpair(&g, 0.0)?;
    c.at_most(
        "mu = 0: relative error against j01^2",
        (e.lambda - BESSEL_J01_SQUARED).abs() / BESSEL_J01_SQUARED,
        0.01,
    );
    let ch = spectral::hardy_constant(&g)?.value;
    for mu in [0.05, 0.1, p.mu, 0.24] {
        if mu < ch {
            let e = spectral::principal_eigenpair(&g, mu)?;
            c.push(&format!("mu = {mu}: lambda_1"), e.lambda, "> 0".into(), e.lambda > 0.0);
        }
    }
    Ok(())
}

fn c3_exponent(p: &Preset, c: &mut Checks) -> Result<()> {
    let g = disk(p.resolution)?;
    for mu in [0.05, 0.1875, 0.24] {
        let e = spectral::principal_eigenpair(&g, mu)?;
        let a = crate::exponents(mu, 2)?.alpha_plus;
        let s = boundary_exponent_fit(&e.phi, default_window(&g))?;
        c.within(&format!("mu = {mu}: fitted exponent"), s, a, 0.05);
    }
    Ok(())
}

struct Brackets {
    green: f64,
    martin: f64,
    equivalence: f64,
}

fn brackets(g: &Arc<Grid>, mu: f64, exclusion: f64) -> Result<Brackets> {
    let k = Kernels::new(g, mu)?;
    let b0 = g.domain().beta0;
    let sources = kernels::sample_points(g, &[b0 / 8.0, b0 / 2.0, 0.9], &[0.0, 1.7]);
    let poles = kernels::sample_boundary_points(g, &[0.0, 2.1, 4.0]);
    Ok(Brackets {
        green: kernels::green_bracket(&k, &sources)?.constant(),
        martin: kernels::martin_bracket(&k, &poles, exclusion)?.constant(),
        equivalence: kernels::equivalence_bracket(&k, &poles, exclusion)?.constant(),
    })
}

fn c4_kernels(p: &Preset, c: &mut Checks) -> Result<()> {
    let fine = disk(p.resolution)?;
    let coarse = disk(p.coarse_resolution)?;
    // Both resolutions skip the same physical neighbourhood of the pole.
    let exclusion = kernels::pole_radius(&coarse, POLE);
    let bf = brackets(&fine, p.mu, exclusion)?;
    let bc = brackets(&coarse, p.mu, exclusion)?;
    for (name, f, co) in [
        ("Green", bf.green, bc.green),
        ("Martin", bf.martin, bc.martin),
        ("Martin-Poisson equivalence", bf.equivalence, bc.equivalence),
    ] {
        c.at_most(&format!("{name}: bracket constant"), f, 50.0);
        // One percent absorbs round-off in the sampled extremes.
        c.at_most(&format!("{name}: growth from coarse to fine"), f / co, 1.01);
    }
    let k0 = Kernels::new(&fine, 0.0)?;
    let b0 = fine.domain().beta0;
    let sources: Vec<Point> = [[0.0, 0.0], [0.3, 0.2], [0.0, -0.6], [0.8, 0.1]]
        .iter()
        .map(|p| fine.coords()[fine.nearest_node(*p).0])
        .collect();
    let green = kernels::classical_green_check(&k0, &sources, b0 / 2.0)?;
    c.at_most("mu = 0: Green vs image formula", green.max_rel_error, 0.02);
    let poles = kernels::sample_boundary_points(&fine, &[0.0, 0.25, 0.6]);
    let poisson = kernels::classical_poisson_check(&k0, &poles, b0 / 2.0)?;
    c.at_most("mu = 0: Martin vs Poisson ratio", poisson.max_rel_error, 0.02);
    Ok(())
}

fn c5_halfspace(p: &Preset, c: &mut Checks) -> Result<()> {
    let k = Kernels::new(&unit_box(p.resolution)?, p.mu)?;
    let r = kernels::halfspace_check(&k)?;
    c.at_most("max relative error on the central third", r.max_rel_error, 0.02);
    Ok(())
}

fn c6_traces(p: &Preset, c: &mut Checks) -> Result<()> {
    let g = disk(p.resolution)?;
    let k = Kernels::new(&g, p.mu)?;
    let e = *k.exponents();
    let gap = e.alpha_plus - e.alpha_minus;
    let col = k.martin_column(POLE)?;
    let ladder = trace::ladder(g.domain().beta0, trace::DEFAULT_LEVELS);
    let masses = ladder
        .iter()
        .map(|&b| trace::trace_mass(&col.field, e.alpha_minus, b))
        .collect::<Result<Vec<_>>>()?;
    c.at_most("Martin column: M(beta) bracket ratio", spread(&masses), 10.0);
    let far = ladder
        .iter()
        .map(|&b| trace::far_field_mass(&col.field, e.alpha_minus, b, POLE, g.domain().beta0))
        .collect::<Result<Vec<_>>>()?;
    let s = trace::decay_exponent(&ladder, &far).unwrap_or(f64::NAN);
    c.within("far-field decay exponent", s, gap, 0.1);
    let levels = trace::classify_levels(e.alpha_plus, e.alpha_minus);
    let center = g.coords()[g.center_node()];
    for (label, tau) in [
        ("Green potential of Lebesgue measure", InteriorMeasure::uniform(&g, 1.0)),
        ("Green function at the center", InteriorMeasure::dirac(center, 1.0)),
    ] {
        let u = k.greens_potential(&tau)?;
        let r = trace::classify_trace(&k, &u, &[], levels)?;
        c.holds(&format!("{label}: trace is zero"), r.verdict == Verdict::TraceZero);
        c.within(&format!("{label}: decay exponent"), r.zero.exponent.unwrap_or(f64::NAN), gap, 0.1);
    }
    Ok(())
}

fn brute_force(f: &[f64], w: &[f64], p: f64) -> f64 {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[b].abs().total_cmp(&f[a].abs()));
    let theta = 1.0 - 1.0 / p;
    let mut best = 0.0f64;
    for mask in 1u32..(1 << f.len()) {
        let (mut s, mut m) = (0.0, 0.0);
        for &i in &order {
            if mask & (1 << i) != 0 {
                s += f[i].abs() * w[i];
                m += w[i];
            }
        }
        best = best.max(s / m.powf(theta));
    }
    best
}

fn c7_weaklp(p: &Preset, c: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut ok = true;
    for _ in 0..100 {
        let n = rng.random_range(5..400);
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let q = rng.random_range(1.1..5.0);
        let (star, norm) = (weak_quasinorm(&f, &w, q), weak_norm(&f, &w, q));
        ok &= star <= norm * (1.0 + 8.0 * f64::EPSILON) && norm <= q / (q - 1.0) * star;
    }
    c.holds("quasinorm <= norm <= p' quasinorm on 100 random fields", ok);
    let mut exact = true;
    for trial in 0..200 {
        let n = 1 + trial % 12;
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..2.0)).collect();
        let q = rng.random_range(1.05..6.0);
        exact &= weak_norm(&f, &w, q) == brute_force(&f, &w, q);
    }
    c.holds("sorted prefix equals subset enumeration (200 instances)", exact);
    let g = disk(p.resolution)?;
    let k = Kernels::new(&g, p.mu)?;
    let (taus, nus) = standard_families(&g);
    let r = verify_regularizing_estimates(&k, &taus, &nus, 0.0)?;
    for pair in &r.pairs {
        c.at_most(&format!("{:?} estimate: ratio spread", pair.pair.potential), pair.spread, 5.0);
    }
    Ok(())
}

fn c8_linear(p: &Preset, c: &mut Checks) -> Result<()> {
    let g = disk(p.resolution)?;
    let k = Kernels::new(&g, p.mu)?;
    let node = |q: Point| g.coords()[g.nearest_node(q).0];
    let tf = make_test_functions(&k)?;
    let tau = InteriorMeasure::dirac(node([0.2, -0.3]), 1.5);
    let nu = BoundaryMeasure::dirac(POLE, 1.0).plus(&BoundaryMeasure::dirac([0.0, -1.0], 0.5))?;
    let sol = solve_linear(&k, &tau, &nu)?;
    for z in &tf {
        let r = weak_residual(&k, &sol.u, &tau, &nu, z)?;
        c.at_most(&format!("{:?}: weak residual", z.kind), r.relative, 1e-3);
    }
    let t1 = InteriorMeasure::dirac(node([0.1, 0.1]), 1.0);
    let t2 = InteriorMeasure::uniform(&g, 0.5);
    let n1 = BoundaryMeasure::dirac(POLE, 1.0);
    let n2 = BoundaryMeasure::from_density(BoundaryDensity::uniform(0.3));
    let a = solve_linear(&k, &t1, &n1)?.u;
    let b = solve_linear(&k, &t2, &n2)?.u;
    let both = InteriorMeasure {
        atoms: t1.atoms.clone(),
        density: t2.density.clone(),
    };
    let sum = solve_linear(&k, &both, &n1.plus(&n2)?)?.u;
    let gap = a.add(&b)?.sub(&sum)?.max_abs() / sum.max_abs();
    c.at_most("additivity", gap, 1e-10);
    let neg = [&a, &b, &sum].iter().map(|f| (-f.min_value()).max(0.0)).fold(0.0, f64::max);
    c.at_most("positivity: largest negative value", neg, 1e-10);
    Ok(())
}

fn nonlinear_kernels(p: &Preset) -> Result<Kernels> {
    Kernels::new(&disk(p.nonlinear_resolution)?, p.mu)
}

fn c9_semilinear(p: &Preset, c: &mut Checks) -> Result<()> {
    let k = nonlinear_kernels(p)?;
    let g = k.grid().clone();
    let opts = SolveOptions::default();
    for (label, nu) in [
        ("Dirac", BoundaryMeasure::dirac(POLE, 1.0)),
        ("uniform density", BoundaryMeasure::from_density(BoundaryDensity::uniform(1.0))),
    ] {
        let s = nonlinear::solve_for(&k, 2.0, nu, &opts)?;
        let r = &s.report;
        c.at_most(&format!("{label}: identity residual"), r.identity_residual, 1e-3);
        let agreement = r.picard.as_ref().map_or(f64::INFINITY, |p| p.agreement);
        c.at_most(&format!("{label}: exhaustion vs Picard"), agreement, 1e-3);
        c.at_most(&format!("{label}: outer monotonicity violation"), r.outer_violation, 1e-10);
        c.at_most(&format!("{label}: u <= K[nu] violation"), r.domination_violation, 1e-10);
    }
    let monotone = SolveOptions {
        levels: 6,
        scheme: InnerScheme::Monotone,
        picard: false,
        ..Default::default()
    };
    let s = nonlinear::solve_for(&k, 2.0, BoundaryMeasure::dirac(POLE, 1.0), &monotone)?;
    c.at_most("inner monotonicity violation", s.report.inner_violation, 1e-10);
    c.at_most("outer monotonicity violation (monotone scheme)", s.report.outer_violation, 1e-10);

    let quick = SolveOptions {
        picard: false,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let rays = g.rays();
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let mut small = BoundaryMeasure::zero();
        let mut extra = BoundaryMeasure::zero();
        for _ in 0..3 {
            let y = rays[rng.random_range(0..rays.len())].boundary;
            small = small.plus(&BoundaryMeasure::dirac(y, rng.random_range(0.1..2.0)))?;
            let z = rays[rng.random_range(0..rays.len())].boundary;
            extra = extra.plus(&BoundaryMeasure::dirac(z, rng.random_range(0.0..1.0)))?;
        }
        let density = BoundaryMeasure::from_density(BoundaryDensity::uniform(rng.random_range(0.0..0.5)));
        let large = small.plus(&extra)?.plus(&density)?;
        let a = nonlinear::solve_for(&k, 2.0, small, &quick)?.u;
        let b = nonlinear::solve_for(&k, 2.0, large, &quick)?.u;
        worst = worst.max(nonlinear::order_violation(&a, &b)?);
    }
    c.at_most("monotonicity in nu on random pairs", worst, 1e-10);
    let a = nonlinear::apriori_scan(&k, 2.0, &BoundaryMeasure::dirac(POLE, 1.0), &[0.01, 0.1, 1.0], &quick)?;
    c.at_most("a-priori ratio spread over two decades", a.spread, 2.0);
    Ok(())
}

fn c10_dirac(p: &Preset, c: &mut Checks) -> Result<()> {
    let k = nonlinear_kernels(p)?;
    let opts = SolveOptions {
        picard: false,
        ..Default::default()
    };
    let (prof, _) = nonlinear::dirac_profile(&k, 2.0, 1.0, POLE, 10, &opts)?;
    c.push(
        "u/(kK) at the finest sample",
        prof.finest_ratio,
        "in [0.9, 1.0]".into(),
        (0.9..=1.0).contains(&prof.finest_ratio),
    );
    c.holds("ratio increases toward the pole", prof.increasing);
    Ok(())
}

fn c11_dichotomy(p: &Preset, c: &mut Checks) -> Result<()> {
    let k = Kernels::new(&disk(p.resolution)?, p.mu)?;
    let opts = SolveOptions {
        picard: false,
        ..Default::default()
    };
    let sup = nonlinear::supercritical_probe(&k, 4.0, POLE, 0.5, 8, None, 0, &opts)?;
    let least = sup.growth.iter().copied().fold(f64::INFINITY, f64::min);
    c.at_least("q = 4: smallest J growth per halving (resolved cutoffs)", least, 1.5);
    let sub = nonlinear::supercritical_probe(&k, 2.0, POLE, 0.5, 8, None, 0, &opts)?;
    c.holds("q = 2: J growth decreases", sub.growth.windows(2).all(|w| w[1] < w[0]));
    c.at_most("q = 2: last J growth", *sub.growth.last().unwrap_or(&f64::NAN), 1.25);
    let kn = nonlinear_kernels(p)?;
    let probe = nonlinear::supercritical_probe(&kn, 4.0, POLE, 0.5, 2, Some(1.0), trace::DEFAULT_LEVELS, &opts)?;
    let decay = probe.trace.expect("trace requested");
    c.holds("q = 4: trace mass ratio decreases along the ladder", decay.decreasing);
    c.at_most("q = 4: final trace mass / reference", decay.final_ratio, 0.1);
    Ok(())
}

fn c12_stability(p: &Preset, c: &mut Checks) -> Result<()> {
    let g = Grid::new(
        DomainSpec::disk(1.0),
        GridOptions::graded(p.stability_resolution).with_lateral(p.stability_lateral),
    )?;
    let k = Kernels::new(&g, p.mu)?;
    // Widths below one boundary cell put all atoms on a single ray.
    let cell = kernels::pole_radius(&g, POLE);
    let widths: Vec<f64> = p.stability_widths.iter().copied().filter(|w| *w >= cell).collect();
    let opts = SolveOptions {
        picard: false,
        ..Default::default()
    };
    let s = nonlinear::stability_ladder(&k, 2.0, 0.0, 1.0, &widths, 16, &opts)?;
    c.holds("L1 and Lq gaps decrease", s.decreasing);
    c.at_most("final L1 gap", *s.l1_gaps.last().unwrap_or(&f64::NAN), 0.05);
    c.at_most("final Lq gap", *s.lq_gaps.last().unwrap_or(&f64::NAN), 0.05);
    Ok(())
}

/// Runs criterion `id` (1..=12).
pub fn run_criterion(id: usize, preset: &Preset) -> CriterionReport {
    let mut c = Checks(Vec::new());
    let run: fn(&Preset, &mut Checks) -> Result<()> = match id {
        1 => c1_hardy,
        2 => c2_eigenvalue,
        3 => c3_exponent,
        4 => c4_kernels,
        5 => c5_halfspace,
        6 => c6_traces,
        7 => c7_weaklp,
        8 => c8_linear,
        9 => c9_semilinear,
        10 => c10_dirac,
        11 => c11_dichotomy,
        12 => c12_stability,
        _ => {
            return CriterionReport {
                id,
                title: "unknown",
                passed: false,
                checks: Vec::new(),
                known_limit: None,
                error: Some(format!("no criterion {id}")),
            }
        }
    };
    let error = run(preset, &mut c).err().map(|e| e.to_string());
    CriterionReport {
        id,
        title: TITLES[id - 1],
        passed: error.is_none() && !c.0.is_empty() && c.0.iter().all(|x| x.passed),
        checks: c.0,
        known_limit: known_limit(id),
        error,
    }
}

pub fn run_all(preset: &Preset) -> Vec<CriterionReport> {
    (1..=12).map(|id| run_criterion(id, preset)).collect()
}
