//! Green and Martin kernels of `-L_μ`, the potentials `𝔾[τ]` and `𝕂[ν]`, the
//! exact half-space Martin kernel, and two-sided estimate checks.
//!
//! A Green column `G(·, y)` solves `A g = e_y`, i.e. the right-hand side is
//! the unit mass spread over the cell of `y`. Martin columns use the ratio
//! `G(·, z)/G(x₀, z)` with `z → y` along the inward normal. Two realizations
//! exist:
//!
//! * [`Kernels::martin_column`] takes `z` at the boundary-adjacent node of the
//!   ray through `y`, the closest the mesh gets to the limit. With the
//!   symmetry `G(x₀, z) = G(z, x₀)`, one column `G(·, x₀)` normalizes every
//!   source, so `𝕂[ν]` costs a single solve.
//! * [`Kernels::martin_column_ratio`] evaluates the ratio at a ladder of
//!   depths `ε` and extrapolates to `ε = 0`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};
use crate::geometry::{DomainKind, Field, Grid, Point};
use crate::measures::{BoundaryMeasure, InteriorMeasure};
use crate::operator::{Backend, DiscreteOperator};
use crate::spectral::{exponents, HardyExponents};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Interior { point: Point },
    Boundary { point: Point },
}

#[derive(Debug, Clone)]
pub struct KernelColumn {
    pub field: Field,
    pub source: Source,
    /// Node carrying the unit source (`y` itself, or the node standing in for `z → y`).
    pub node: usize,
    /// Normalization node `x₀` (Martin columns only).
    pub x0: Option<usize>,
}

/// Kernel computations for one operator `-L_μ` on one grid.
#[derive(Debug)]
pub struct Kernels {
    op: DiscreteOperator,
    exps: HardyExponents<f64>,
    backend: Backend,
    x0: usize,
    snap: bool,
    green_x0: OnceLock<Result<Arc<Vec<f64>>>>,
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Kernels {
    /// Banded direct solves, `x₀` at the grid's center node, sources must be nodes.
    pub fn new(grid: &Arc<Grid>, mu: f64) -> Result<Self> {
        let op = DiscreteOperator::assemble(grid, mu, 0.0)?;
        Self::from_operator(op)
    }

    pub fn from_operator(op: DiscreteOperator) -> Result<Self> {
        let exps = exponents(op.mu().max(0.0), op.grid().domain().ambient_dim)?;
        let x0 = op.grid().center_node();
        Ok(Self {
            op,
            exps,
            backend: Backend::Band,
            x0,
            snap: false,
            green_x0: OnceLock::new(),
        })
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    /// Snap off-node interior sources to the nearest node instead of failing.
    pub fn with_snap(mut self, snap: bool) -> Self {
        self.snap = snap;
        self
    }

    pub fn with_x0(mut self, x0: Point) -> Result<Self> {
        self.x0 = self.op.grid().node_at(x0, self.snap)?;
        self.green_x0 = OnceLock::new();
        Ok(self)
    }

    pub fn operator(&self) -> &DiscreteOperator {
        &self.op
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.op.grid()
    }

    pub fn exponents(&self) -> &HardyExponents<f64> {
        &self.exps
    }

    pub fn mu(&self) -> f64 {
        self.op.mu()
    }

    pub fn x0(&self) -> usize {
        self.x0
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// `A⁻¹ b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.op.solve_load(b, self.backend)
    }

    fn unit(&self, node: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.grid().len()];
        e[node] = 1.0;
        e
    }

    /// `G(·, x₀)`, cached.
    pub fn green_x0(&self) -> Result<Arc<Vec<f64>>> {
        self.green_x0
            .get_or_init(|| self.solve(&self.unit(self.x0)).map(Arc::new))
            .clone()
    }

    /// `G(·, y)` for an interior node `y`.
    pub fn green_column(&self, y: Point) -> Result<KernelColumn> {
        let node = self.grid().node_at(y, self.snap)?;
        let g = self.solve(&self.unit(node))?;
        Ok(KernelColumn {
            field: Field::new(self.grid(), g)?,
            source: Source::Interior { point: y },
            node,
            x0: None,
        })
    }

    /// Boundary-adjacent node on the ray through the boundary point `y`.
    pub fn boundary_node(&self, y: Point) -> Result<usize> {
        let grid = self.grid();
        let d = grid.domain().distance_to_boundary(y)?;
        if d > 1e-9 * grid.domain().reach() {
            return Err(HardyError::Domain(format!(
                "{y:?} is not a boundary point"
            )));
        }
        Ok(grid.rays()[grid.nearest_ray(y)].nodes[0])
    }

    /// `K(·, y) = G(·, z)/G(x₀, z)` with `z` the boundary-adjacent node below `y`.
    pub fn martin_column(&self, y: Point) -> Result<KernelColumn> {
        let z = self.boundary_node(y)?;
        let g = self.solve(&self.unit(z))?;
        let scale = g[self.x0];
        if !(scale > 0.0) {
            return Err(HardyError::Numerical("G(x0, z) is not positive".into()));
        }
        Ok(KernelColumn {
            field: Field::new(self.grid(), g.iter().map(|v| v / scale).collect())?,
            source: Source::Boundary { point: y },
            node: z,
            x0: Some(self.x0),
        })
    }

    /// Martin column by the ratio definition at depths `eps` (nodes nearest to
    /// each depth on the normal ray), extrapolated polynomially to depth 0.
    ///
    /// The ratios must be monotone in `ε` (within `1e-3` relative) at every node
    /// farther than `2·max ε` from `y`; otherwise an instability error carries
    /// the offending node count and the depths used.
    pub fn martin_column_ratio(&self, y: Point, eps: &[f64]) -> Result<RatioMartin> {
        if eps.len() < 2 {
            return Err(HardyError::Parameter("need at least two depths".into()));
        }
        let grid = self.grid();
        let ray = &grid.rays()[grid.nearest_ray(y)];
        let mut depths = Vec::new();
        let mut columns = Vec::new();
        for &e in eps {
            let (z, _) = ray
                .nodes
                .iter()
                .map(|&k| (k, (grid.deltas()[k] - e).abs()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("ray has nodes");
            let g = self.solve(&self.unit(z))?;
            let scale = g[self.x0];
            depths.push(grid.deltas()[z]);
            columns.push(g.iter().map(|v| v / scale).collect::<Vec<f64>>());
        }
        let n = grid.len();
        let mut limit = vec![0.0; n];
        for (i, li) in limit.iter_mut().enumerate() {
            let ys: Vec<f64> = columns.iter().map(|c| c[i]).collect();
            *li = neville_at_zero(&depths, &ys);
        }
        let far = 2.0 * eps.iter().copied().fold(0.0, f64::max);
        let mut bad = 0;
        for (i, c) in grid.coords().iter().enumerate() {
            if dist(*c, ray.boundary) < far || columns.len() < 3 {
                continue;
            }
            let v: Vec<f64> = columns.iter().map(|col| col[i]).collect();
            for w in v.windows(3) {
                let (d1, d2) = (w[1] - w[0], w[2] - w[1]);
                if d1 * d2 < 0.0 && d1.abs().min(d2.abs()) > 1e-3 * w[2].abs() {
                    bad += 1;
                }
            }
        }
        if bad > 0 {
            return Err(HardyError::Instability {
                nodes: bad,
                eps: depths,
            });
        }
        limit[self.x0] = 1.0;
        Ok(RatioMartin {
            column: KernelColumn {
                field: Field::new(grid, limit)?,
                source: Source::Boundary { point: y },
                node: ray.nodes[0],
                x0: Some(self.x0),
            },
            depths,
            raw: columns,
        })
    }

    /// Load vector whose solution is `𝕂[ν]`.
    pub fn martin_load(&self, nu: &BoundaryMeasure) -> Result<Vec<f64>> {
        let grid = self.grid();
        let masses = nu.ray_masses(grid)?;
        let gx0 = self.green_x0()?;
        let mut b = vec![0.0; grid.len()];
        for (ray, m) in grid.rays().iter().zip(masses) {
            if m != 0.0 {
                let z = ray.nodes[0];
                b[z] += m / gx0[z];
            }
        }
        Ok(b)
    }

    /// `𝕂[ν] = ∫ K(·, y) dν(y)`.
    pub fn martin_integral(&self, nu: &BoundaryMeasure) -> Result<Field> {
        let b = self.martin_load(nu)?;
        Field::new(self.grid(), self.solve(&b)?)
    }

    /// Load vector whose solution is `𝔾[τ]`.
    pub fn green_load(&self, tau: &InteriorMeasure) -> Result<Vec<f64>> {
        let grid = self.grid();
        tau.validate(grid)?;
        let mut b = match &tau.density {
            Some(d) => d
                .values()
                .iter()
                .zip(grid.volumes())
                .map(|(f, v)| f * v)
                .collect(),
            None => vec![0.0; grid.len()],
        };
        for a in &tau.atoms {
            b[grid.node_at(a.point, self.snap)?] += a.mass;
        }
        Ok(b)
    }

    /// `𝔾[τ] = ∫ G(·, y) dτ(y)`.
    pub fn greens_potential(&self, tau: &InteriorMeasure) -> Result<Field> {
        let b = self.green_load(tau)?;
        Field::new(self.grid(), self.solve(&b)?)
    }

    /// `𝔾[f]` for a node-sampled density `f`.
    pub fn greens_potential_density(&self, f: &[f64]) -> Result<Vec<f64>> {
        let b: Vec<f64> = f
            .iter()
            .zip(self.grid().volumes())
            .map(|(a, v)| a * v)
            .collect();
        self.solve(&b)
    }
}

/// Value at `x = 0` of the interpolating polynomial through `(xs, ys)`.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

#[derive(Debug, Clone)]
pub struct RatioMartin {
    pub column: KernelColumn,
    /// Depths `δ(z)` actually used.
    pub depths: Vec<f64>,
    /// Normalized ratios per depth.
    pub raw: Vec<Vec<f64>>,
}

/// `x₁^{α+} |x|^{2α- - N}`, the Martin kernel of `{x₁ > 0}` with pole at the origin.
pub fn halfspace_martin_exact(mu: f64, dim: usize, x: Point) -> Result<f64> {
    if !(x[0] > 0.0) {
        return Err(HardyError::Domain(format!("x₁ = {} must be positive", x[0])));
    }
    let e = exponents(mu, dim)?;
    let r = x[0].hypot(x[1]);
    Ok(x[0].powf(e.alpha_plus) * r.powf(2.0 * e.alpha_minus - dim as f64))
}

#[derive(Debug, Clone, Serialize)]
pub struct HalfspaceReport {
    pub mu: f64,
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    pub samples: usize,
    /// Multiple of the box Martin column added to the harmonic lift.
    pub pole_weight: f64,
}

/// Compares the box model with the exact half-space kernel `P(x) = x₁^{α+}|x|^{2α--N}`.
///
/// The numeric kernel is `H + c·K_box(·, 0)`: `H` is the `L_μ`-harmonic lift of
/// the exact values on the truncation faces, `K_box` the discrete Martin column
/// with pole at the origin, and `c` matches `P` at `x₀`. Errors are measured on
/// the central third `|x₂| ≤ W/3`, away from the pole (`|x| ≥ β₀/4`) and off the
/// two node layers next to `x₁ = 0`.
pub fn halfspace_check(kernels: &Kernels) -> Result<HalfspaceReport> {
    let grid = kernels.grid();
    let half_width = match grid.domain().kind {
        DomainKind::HalfspaceBox { half_width, .. } => half_width,
        DomainKind::Disk { .. } => {
            return Err(HardyError::Domain("half-space check needs the box model".into()))
        }
    };
    let mu = kernels.mu();
    let dim = grid.domain().ambient_dim;
    let exact = |p: Point| halfspace_martin_exact(mu, dim, p).unwrap_or(0.0);
    let lift_load = kernels.operator().boundary_load(|p| if p[0] > 0.0 { exact(p) } else { 0.0 });
    let lift = kernels.solve(&lift_load)?;
    let k = kernels.martin_column([0.0, 0.0])?;
    let x0 = kernels.x0();
    let c = exact(grid.coords()[x0]) - lift[x0];
    let layer = grid.rays()[0].nodes.get(1).map_or(0.0, |&k| grid.deltas()[k]);
    let beta0 = grid.domain().beta0;
    let (mut max, mut sum, mut n) = (0.0f64, 0.0, 0usize);
    for (i, p) in grid.coords().iter().enumerate() {
        if p[1].abs() > half_width / 3.0 || p[0] <= layer || p[0].hypot(p[1]) < beta0 / 4.0 {
            continue;
        }
        let num = lift[i] + c * k.field.values()[i];
        let ex = exact(*p);
        let e = (num - ex).abs() / ex;
        max = max.max(e);
        sum += e;
        n += 1;
    }
    Ok(HalfspaceReport {
        mu,
        max_rel_error: max,
        mean_rel_error: sum / n.max(1) as f64,
        samples: n,
        pole_weight: c,
    })
}

/// Extremes of `kernel / reference` over sampled pairs.
#[derive(Debug, Clone, Copy, Serialize, Default)]
pub struct Bracket {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
}

impl Bracket {
    fn new() -> Self {
        Self {
            min_ratio: f64::INFINITY,
            max_ratio: 0.0,
            samples: 0,
        }
    }

    fn push(&mut self, r: f64) {
        if r.is_finite() && r > 0.0 {
            self.min_ratio = self.min_ratio.min(r);
            self.max_ratio = self.max_ratio.max(r);
            self.samples += 1;
        }
    }

    /// Smallest `c` with every ratio in `[1/c, c]`.
    pub fn constant(&self) -> f64 {
        self.max_ratio.max(1.0 / self.min_ratio)
    }

    /// `max/min`: the bracket width free of normalization constants.
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Interior sample points at the given depths along the given boundary parameters.
pub fn sample_points(grid: &Grid, depths: &[f64], params: &[f64]) -> Vec<Point> {
    let mut out = Vec::new();
    for &d in depths {
        for &s in params {
            let p = grid.domain().point_at(s, d);
            out.push(grid.coords()[grid.nearest_node(p).0]);
        }
    }
    out
}

/// Boundary sample points at the given parameters, snapped to grid rays.
pub fn sample_boundary_points(grid: &Grid, params: &[f64]) -> Vec<Point> {
    params
        .iter()
        .map(|&s| grid.rays()[grid.nearest_ray(grid.domain().boundary_point(s))].boundary)
        .collect()
}

fn neighbors(grid: &Grid, node: usize) -> Vec<usize> {
    let mut v = vec![node];
    for l in grid.links() {
        if l.a == node {
            v.push(l.b);
        } else if l.b == node {
            v.push(l.a);
        }
    }
    v
}

/// Two-dimensional form of the Green estimate: `G(x, y)` against
/// `log(1 + (δ(x)δ(y))^{α+}/|x-y|^{2α+})`. The source cell and its first ring
/// of neighbors are excluded.
pub fn green_bracket(kernels: &Kernels, sources: &[Point]) -> Result<Bracket> {
    let grid = kernels.grid();
    let ap = kernels.exponents().alpha_plus;
    let dim = grid.domain().ambient_dim;
    let mut b = Bracket::new();
    for &y in sources {
        let col = kernels.green_column(y)?;
        let skip = neighbors(grid, col.node);
        let dy = grid.deltas()[col.node];
        for (i, (&x, &dx)) in grid.coords().iter().zip(grid.deltas()).enumerate() {
            if skip.contains(&i) {
                continue;
            }
            let r = dist(x, y);
            let reference = if dim == 2 {
                (1.0 + (dx * dy).powf(ap) / r.powf(2.0 * ap)).ln()
            } else {
                let a = r.powf(2.0 - dim as f64);
                let c = (dx * dy).powf(ap) * r.powf(2.0 * kernels.exponents().alpha_minus - dim as f64);
                a.min(c)
            };
            b.push(col.field.values()[i] / reference);
        }
    }
    Ok(b)
}

/// Classical upper bound `G₀(x, y) ≤ c·min{δ(x), δ(y)}|x-y|^{1-N}`; returns the
/// bracket of `G/min{δ(x),δ(y)}|x-y|^{1-N}` whose maximum is the constant.
pub fn classical_green_bracket(kernels: &Kernels, sources: &[Point]) -> Result<Bracket> {
    let grid = kernels.grid();
    let dim = grid.domain().ambient_dim as f64;
    let mut b = Bracket::new();
    for &y in sources {
        let col = kernels.green_column(y)?;
        let skip = neighbors(grid, col.node);
        let dy = grid.deltas()[col.node];
        for (i, (&x, &dx)) in grid.coords().iter().zip(grid.deltas()).enumerate() {
            if !skip.contains(&i) {
                let reference = dx.min(dy) * dist(x, y).powf(1.0 - dim);
                b.push(col.field.values()[i] / reference);
            }
        }
    }
    Ok(b)
}

/// Lateral width of the boundary cell carrying the pole at `y`. The discrete
/// Martin column is a Dirac mollified over this cell, so bracket checks skip
/// nodes closer to the pole than this.
pub fn pole_radius(grid: &Grid, y: Point) -> f64 {
    let ray = &grid.rays()[grid.nearest_ray(y)];
    match grid.domain().kind {
        DomainKind::Disk { radius } => radius * ray.width,
        DomainKind::HalfspaceBox { .. } => ray.width,
    }
}

/// Martin estimate `K(x, y) ∼ δ(x)^{α+}|x-y|^{2α- - N}` over nodes with
/// `|x-y| ≥ exclusion`.
pub fn martin_bracket(kernels: &Kernels, poles: &[Point], exclusion: f64) -> Result<Bracket> {
    let grid = kernels.grid();
    let e = *kernels.exponents();
    let dim = grid.domain().ambient_dim as f64;
    let mut b = Bracket::new();
    for &y in poles {
        let col = kernels.martin_column(y)?;
        for (i, (&x, &dx)) in grid.coords().iter().zip(grid.deltas()).enumerate() {
            if dist(x, y) >= exclusion {
                let reference = dx.powf(e.alpha_plus) * dist(x, y).powf(2.0 * e.alpha_minus - dim);
                b.push(col.field.values()[i] / reference);
            }
        }
    }
    Ok(b)
}

/// Classical Poisson kernel of the model domain (disk; half-plane for the box).
pub fn classical_poisson(grid: &Grid, x: Point, y: Point) -> f64 {
    let dim = grid.domain().ambient_dim as f64;
    let r = dist(x, y);
    match grid.domain().kind {
        DomainKind::Disk { radius } => {
            (radius * radius - x[0] * x[0] - x[1] * x[1]) / (2.0 * PI * radius * r.powf(dim))
        }
        DomainKind::HalfspaceBox { .. } => x[0] / (PI * r.powf(dim)),
    }
}

/// Green function of `-Δ` on the disk of radius `R` by the image formula.
pub fn disk_green_exact(radius: f64, x: Point, y: Point) -> f64 {
    let r = dist(x, y);
    let ny = y[0].hypot(y[1]);
    let far = if ny == 0.0 {
        radius
    } else {
        let s = radius * radius / (ny * ny);
        ny * dist(x, [s * y[0], s * y[1]]) / radius
    };
    (far / r).ln() / (2.0 * PI)
}

/// Pointwise relative error of a kernel against a classical formula.
#[derive(Debug, Clone, Copy, Serialize, Default)]
pub struct OracleReport {
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    pub samples: usize,
    pub exclusion: f64,
}

fn oracle_errors(pairs: impl Iterator<Item = (f64, f64)>, exclusion: f64) -> OracleReport {
    let (mut max, mut sum, mut n) = (0.0f64, 0.0, 0usize);
    for (num, exact) in pairs {
        let e = (num - exact).abs() / exact.abs();
        max = max.max(e);
        sum += e;
        n += 1;
    }
    OracleReport {
        max_rel_error: max,
        mean_rel_error: sum / n.max(1) as f64,
        samples: n,
        exclusion,
    }
}

fn need_disk_mu0(kernels: &Kernels) -> Result<f64> {
    if kernels.mu() != 0.0 {
        return Err(HardyError::Parameter("classical oracles need μ = 0".into()));
    }
    match kernels.grid().domain().kind {
        DomainKind::Disk { radius } => Ok(radius),
        DomainKind::HalfspaceBox { .. } => Err(HardyError::Domain("classical oracles need the disk".into())),
    }
}

/// `G(·, y)` at `μ = 0` against the image formula, over nodes with
/// `|x - y| ≥ exclusion`.
pub fn classical_green_check(kernels: &Kernels, sources: &[Point], exclusion: f64) -> Result<OracleReport> {
    let radius = need_disk_mu0(kernels)?;
    let grid = kernels.grid();
    let mut pairs = Vec::new();
    for &y in sources {
        let col = kernels.green_column(y)?;
        let y = grid.coords()[col.node];
        for (i, &x) in grid.coords().iter().enumerate() {
            if dist(x, y) >= exclusion {
                pairs.push((col.field.values()[i], disk_green_exact(radius, x, y)));
            }
        }
    }
    Ok(oracle_errors(pairs.into_iter(), exclusion))
}

/// `K(·, y)` at `μ = 0` against the Poisson ratio `P(x, y)/P(x₀, y)`, over
/// nodes with `|x - y| ≥ exclusion`.
pub fn classical_poisson_check(kernels: &Kernels, poles: &[Point], exclusion: f64) -> Result<OracleReport> {
    need_disk_mu0(kernels)?;
    let grid = kernels.grid();
    let x0 = grid.coords()[kernels.x0()];
    let mut pairs = Vec::new();
    for &y in poles {
        let col = kernels.martin_column(y)?;
        let y = grid.rays()[grid.nearest_ray(y)].boundary;
        let p0 = classical_poisson(grid, x0, y);
        for (i, &x) in grid.coords().iter().enumerate() {
            if dist(x, y) >= exclusion {
                pairs.push((col.field.values()[i], classical_poisson(grid, x, y) / p0));
            }
        }
    }
    Ok(oracle_errors(pairs.into_iter(), exclusion))
}

/// Equivalence `K(x,y)/δ(x)^{α-} ∼ P(x,y)(|x-y|/δ(x))^{2α-}` with the classical
/// Poisson kernel `P`, over nodes with `|x-y| ≥ exclusion`.
pub fn equivalence_bracket(kernels: &Kernels, poles: &[Point], exclusion: f64) -> Result<Bracket> {
    let grid = kernels.grid();
    let am = kernels.exponents().alpha_minus;
    let mut b = Bracket::new();
    for &y in poles {
        let col = kernels.martin_column(y)?;
        for (i, (&x, &dx)) in grid.coords().iter().zip(grid.deltas()).enumerate() {
            if dist(x, y) >= exclusion {
                let lhs = col.field.values()[i] / dx.powf(am);
                let rhs = classical_poisson(grid, x, y) * (dist(x, y) / dx).powf(2.0 * am);
                b.push(lhs / rhs);
            }
        }
    }
    Ok(b)
}

/// Joint least-squares fit `ln K ≈ c + a ln δ(x) + b ln|x-y|` over nodes with
/// `δ ∈ window` and `4δ ≤ |x-y| ≤ r_max`; returns `(a, b)`.
pub fn martin_power_laws(
    column: &KernelColumn,
    window: (f64, f64),
    r_max: f64,
) -> Result<(f64, f64)> {
    let grid = column.field.grid();
    let y = match column.source {
        Source::Boundary { point } => point,
        Source::Interior { .. } => {
            return Err(HardyError::Parameter("power laws need a Martin column".into()))
        }
    };
    let mut rows = Vec::new();
    for ((&x, &d), &k) in grid.coords().iter().zip(grid.deltas()).zip(column.field.values()) {
        let r = dist(x, y);
        if d >= window.0 && d <= window.1 && r >= 4.0 * d && r <= r_max {
            if !(k > 0.0) {
                return Err(HardyError::Numerical("nonpositive Martin value".into()));
            }
            rows.push((d.ln(), r.ln(), k.ln()));
        }
    }
    if rows.len() < 3 {
        return Err(HardyError::Numerical("too few samples for the power-law fit".into()));
    }
    let a = nalgebra::DMatrix::from_fn(rows.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => rows[i].0,
        _ => rows[i].1,
    });
    let rhs = nalgebra::DVector::from_iterator(rows.len(), rows.iter().map(|r| r.2));
    let sol = a
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| HardyError::Numerical(e.to_string()))?;
    Ok((sol[1], sol[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, GridOptions};

    #[test]
    fn exact_halfspace_kernel() {
        let x = [0.3, 0.4];
        let v = halfspace_martin_exact(0.0, 2, x).unwrap();
        assert!((v - 0.3 / 0.25).abs() < 1e-14);
        let e = exponents(0.1875, 2).unwrap();
        let s = 2.5;
        let a = halfspace_martin_exact(0.1875, 2, x).unwrap();
        let b = halfspace_martin_exact(0.1875, 2, [s * x[0], s * x[1]]).unwrap();
        assert!((b - s.powf(1.0 + e.alpha_minus - 2.0) * a).abs() < 1e-14 * a);
        assert!(halfspace_martin_exact(0.1, 2, [0.0, 1.0]).is_err());
    }

    #[test]
    fn neville_recovers_polynomials() {
        let xs = [0.5, 0.25, 0.125];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn martin_normalization_and_positivity() {
        let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(24)).unwrap();
        let k = Kernels::new(&g, 0.1875).unwrap();
        let col = k.martin_column([1.0, 0.0]).unwrap();
        assert_eq!(col.field.values()[k.x0()], 1.0);
        assert!(col.field.min_value() > 0.0);
        let nu = BoundaryMeasure::dirac([1.0, 0.0], 1.0);
        let kn = k.martin_integral(&nu).unwrap();
        for (a, b) in kn.values().iter().zip(col.field.values()) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn green_symmetry_and_dirac_potential() {
        let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(24)).unwrap();
        let k = Kernels::new(&g, 0.1).unwrap();
        let (a, b) = (g.coords()[40], g.coords()[300]);
        let ga = k.green_column(a).unwrap();
        let gb = k.green_column(b).unwrap();
        let (x, y) = (ga.field.values()[gb.node], gb.field.values()[ga.node]);
        assert!((x - y).abs() <= 1e-10 * x);
        let pot = k.greens_potential(&InteriorMeasure::dirac(a, 1.0)).unwrap();
        assert_eq!(pot.values(), ga.field.values());
        assert!(k.green_column([0.123, 0.456]).is_err());
    }
}
