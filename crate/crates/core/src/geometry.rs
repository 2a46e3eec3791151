//! Model domains, the boundary-distance field, level sets `Σ_β`,
//! exhaustions `D_β`, and the cell-centered finite-volume grids.
//!
//! Two domains are modelled: the disk of radius `R` and the box
//! `[0, H] × [-W, W]` standing in for the half-space `{x₁ > 0}`. For the box the
//! Hardy weight is measured from the hyperplane `x₁ = 0` only; the lateral and
//! top faces are truncation boundaries.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    Disk { radius: f64 },
    HalfspaceBox { height: f64, half_width: f64 },
}

/// A model domain `Ω`, optionally shrunk to the exhaustion `D_β = {δ > inset}`.
///
/// `δ` is always the distance to the boundary of the full domain, never to
/// the boundary of the exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub kind: DomainKind,
    pub ambient_dim: usize,
    pub beta0: f64,
    #[serde(default)]
    pub inset: f64,
}

impl DomainSpec {
    /// Disk with the collar width `β₀ = R/2`.
    pub fn disk(radius: f64) -> Self {
        Self {
            kind: DomainKind::Disk { radius },
            ambient_dim: 2,
            beta0: radius / 2.0,
            inset: 0.0,
        }
    }

    /// Half-space box `[0, H] × [-W, W]` with `β₀ = H/2`.
    pub fn halfspace_box(height: f64, half_width: f64) -> Self {
        Self {
            kind: DomainKind::HalfspaceBox { height, half_width },
            ambient_dim: 2,
            beta0: height / 2.0,
            inset: 0.0,
        }
    }

    pub fn with_dim(mut self, n: usize) -> Self {
        self.ambient_dim = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.ambient_dim < 2 {
            return Err(HardyError::Parameter(format!(
                "ambient dimension {} < 2",
                self.ambient_dim
            )));
        }
        let reach = match self.kind {
            DomainKind::Disk { radius } => radius,
            DomainKind::HalfspaceBox { height, half_width } => {
                if !(half_width > 0.0) {
                    return Err(HardyError::Parameter("half_width must be positive".into()));
                }
                height
            }
        };
        if !(reach > 0.0) {
            return Err(HardyError::Parameter("domain size must be positive".into()));
        }
        if !(self.beta0 > 0.0 && self.beta0 < reach) {
            return Err(HardyError::Range {
                what: "beta0",
                value: self.beta0,
                lo: 0.0,
                hi: reach,
            });
        }
        Ok(())
    }

    /// Distance from the interior reference point to the boundary (disk radius or box height).
    pub fn reach(&self) -> f64 {
        match self.kind {
            DomainKind::Disk { radius } => radius,
            DomainKind::HalfspaceBox { height, .. } => height,
        }
    }

    pub fn center(&self) -> Point {
        match self.kind {
            DomainKind::Disk { .. } => [0.0, 0.0],
            DomainKind::HalfspaceBox { height, .. } => [height / 2.0, 0.0],
        }
    }

    /// `|Ω|` of the full domain.
    pub fn volume(&self) -> f64 {
        match self.kind {
            DomainKind::Disk { radius } => PI * radius * radius,
            DomainKind::HalfspaceBox { height, half_width } => 2.0 * half_width * height,
        }
    }

    /// `δ(x) = dist(x, ∂Ω)`; on the box this is `x₁`.
    pub fn distance_to_boundary(&self, p: Point) -> Result<f64> {
        let tol = 1e-12 * self.reach();
        match self.kind {
            DomainKind::Disk { radius } => {
                let r = p[0].hypot(p[1]);
                if r > radius + tol {
                    return Err(HardyError::Domain(format!(
                        "point {p:?} outside disk of radius {radius}"
                    )));
                }
                Ok((radius - r).max(0.0))
            }
            DomainKind::HalfspaceBox { height, half_width } => {
                if p[0] < -tol || p[0] > height + tol || p[1].abs() > half_width + tol {
                    return Err(HardyError::Domain(format!("point {p:?} outside box")));
                }
                Ok(p[0].max(0.0))
            }
        }
    }

    /// Whether `p` lies in the (possibly shrunk) open domain.
    pub fn contains(&self, p: Point) -> bool {
        self.distance_to_boundary(p)
            .map(|d| d > self.inset)
            .unwrap_or(false)
    }

    /// Nearest boundary point `σ(x)`; unique inside the closed collar `δ ≤ β₀`.
    pub fn boundary_projection(&self, p: Point) -> Result<Point> {
        let delta = self.distance_to_boundary(p)?;
        if delta > self.beta0 {
            return Err(HardyError::Collar {
                delta,
                beta0: self.beta0,
            });
        }
        Ok(match self.kind {
            DomainKind::Disk { radius } => {
                let r = p[0].hypot(p[1]);
                [radius * p[0] / r, radius * p[1] / r]
            }
            DomainKind::HalfspaceBox { .. } => [0.0, p[1]],
        })
    }

    /// Point at depth `delta` on the inward normal through the boundary
    /// point with parameter `s`.
    pub fn point_at(&self, s: f64, delta: f64) -> Point {
        match self.kind {
            DomainKind::Disk { radius } => [(radius - delta) * s.cos(), (radius - delta) * s.sin()],
            DomainKind::HalfspaceBox { .. } => [delta, s],
        }
    }

    /// Inward unit normal at a boundary point.
    pub fn inward_normal(&self, y: Point) -> Point {
        match self.kind {
            DomainKind::Disk { .. } => {
                let r = y[0].hypot(y[1]);
                [-y[0] / r, -y[1] / r]
            }
            DomainKind::HalfspaceBox { .. } => [1.0, 0.0],
        }
    }

    /// Boundary point for a boundary parameter (angle on the disk, `x₂` on the box).
    pub fn boundary_point(&self, s: f64) -> Point {
        match self.kind {
            DomainKind::Disk { radius } => [radius * s.cos(), radius * s.sin()],
            DomainKind::HalfspaceBox { .. } => [0.0, s],
        }
    }

    /// Exhaustion `D_β = {x ∈ Ω : δ(x) > β}`.
    pub fn exhaustion(&self, beta: f64) -> Result<DomainSpec> {
        if !(beta > 0.0 && beta < self.beta0) {
            return Err(HardyError::Range {
                what: "beta",
                value: beta,
                lo: 0.0,
                hi: self.beta0,
            });
        }
        Ok(DomainSpec {
            inset: beta,
            ..*self
        })
    }

    /// Geometry of the (shrunk) domain as a stand-alone shape.
    pub fn effective_kind(&self) -> DomainKind {
        match self.kind {
            DomainKind::Disk { radius } => DomainKind::Disk {
                radius: radius - self.inset,
            },
            DomainKind::HalfspaceBox { height, half_width } => DomainKind::HalfspaceBox {
                height: height - self.inset,
                half_width,
            },
        }
    }

    /// `|D_β|` (the box loses a slab, the disk an annulus).
    pub fn effective_volume(&self) -> f64 {
        match self.effective_kind() {
            DomainKind::Disk { radius } => PI * radius * radius,
            DomainKind::HalfspaceBox { height, half_width } => 2.0 * half_width * height,
        }
    }
}

/// Spacing of cells normal to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Grading {
    Uniform,
    /// Cell width `min(h, h/refinement + stretch·δ)`: geometric growth away
    /// from the boundary until the core spacing `h` is reached.
    Geometric { refinement: f64, stretch: f64 },
}

impl Grading {
    /// Boundary cells of width `h·1e-10` growing by a factor of about 1.5.
    ///
    /// The depth matters: the discrete Hardy constant approaches 1/4 only
    /// like `π²/ln²(1/δ_min)`, and so does the suppression of spurious
    /// `δ^{α-}` components in discrete solutions.
    pub fn geometric() -> Self {
        Grading::Geometric {
            refinement: 1e10,
            stretch: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Radial cells (disk, including the center cell) or `x₁` cells (box).
    pub resolution: usize,
    /// Angular cells (disk) or lateral cells (box, rounded up to odd).
    #[serde(default)]
    pub lateral: Option<usize>,
    pub grading: Grading,
}

impl GridOptions {
    pub fn uniform(resolution: usize) -> Self {
        Self {
            resolution,
            lateral: None,
            grading: Grading::Uniform,
        }
    }

    pub fn graded(resolution: usize) -> Self {
        Self {
            resolution,
            lateral: None,
            grading: Grading::geometric(),
        }
    }

    pub fn with_lateral(mut self, n: usize) -> Self {
        self.lateral = Some(n);
        self
    }
}

/// Interior face between two nodes: flux `t (u_a - u_b)`.
#[derive(Debug, Clone, Copy)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub t: f64,
    pub dist: f64,
}

/// Face on `∂Ω` next to `node`: flux `t (u_node - g(face))`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryLink {
    pub node: usize,
    pub t: f64,
    pub face: Point,
    /// Face on the physical boundary (always for the disk; `x₁ = 0` for the box).
    pub physical: bool,
}

/// Inward normal line of nodes through one boundary cell, ordered by increasing `δ`.
#[derive(Debug, Clone)]
pub struct Ray {
    pub boundary: Point,
    /// Boundary parameter (angle or `x₂`).
    pub param: f64,
    /// Parameter width of the boundary cell.
    pub width: f64,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
enum Layout {
    Polar { n_rings: usize, n_theta: usize },
    Tensor { n1: usize, n2: usize },
}

/// Cell-centered finite-volume mesh of a domain.
#[derive(Debug, Clone)]
pub struct Grid {
    domain: DomainSpec,
    options: GridOptions,
    layout: Layout,
    coords: Vec<Point>,
    volume: Vec<f64>,
    delta: Vec<f64>,
    normal_width: Vec<f64>,
    links: Vec<Link>,
    boundary_links: Vec<BoundaryLink>,
    rays: Vec<Ray>,
    center_node: usize,
}

/// Cell widths along `δ`, from the boundary inward, summing to `length`.
fn normal_widths(length: f64, h: f64, grading: Grading) -> Vec<f64> {
    let mut widths = Vec::new();
    let mut covered = 0.0;
    if let Grading::Geometric {
        refinement,
        stretch,
    } = grading
    {
        loop {
            let w = (h / refinement + stretch * covered).min(h);
            if w >= h || covered + w > 0.5 * length {
                break;
            }
            widths.push(w);
            covered += w;
        }
    }
    let rest = length - covered;
    let m = ((rest / h).round() as usize).max(1);
    widths.extend(std::iter::repeat_n(rest / m as f64, m));
    widths
}

impl Grid {
    pub fn new(domain: DomainSpec, options: GridOptions) -> Result<Arc<Grid>> {
        domain.validate()?;
        if options.resolution < 4 {
            return Err(HardyError::Parameter(format!(
                "resolution {} too small",
                options.resolution
            )));
        }
        let grid = match domain.kind {
            DomainKind::Disk { radius } => Self::polar(domain, options, radius),
            DomainKind::HalfspaceBox { height, half_width } => {
                Self::tensor(domain, options, height, half_width)
            }
        };
        Ok(Arc::new(grid))
    }

    fn polar(domain: DomainSpec, options: GridOptions, radius: f64) -> Grid {
        let h = radius / (options.resolution as f64 - 0.5);
        let n_theta = options.lateral.unwrap_or(options.resolution).max(8);
        let dtheta = 2.0 * PI / n_theta as f64;
        let core = 0.5 * h;
        // Faces are accumulated in δ from the boundary so that the thin
        // boundary cells keep full relative precision; ring 0 is innermost.
        let widths = normal_widths(radius - core, h, options.grading);
        let mut dfaces = vec![0.0];
        for w in &widths {
            let last = *dfaces.last().expect("nonempty");
            dfaces.push(last + w);
        }
        *dfaces.last_mut().expect("nonempty") = radius - core;
        let n_rings = widths.len();
        // δ of the inner and outer face of each ring, and of its node
        let d_in: Vec<f64> = (0..n_rings).map(|i| dfaces[n_rings - i]).collect();
        let d_out: Vec<f64> = (0..n_rings).map(|i| dfaces[n_rings - 1 - i]).collect();
        let ring_d: Vec<f64> = (0..n_rings).map(|i| 0.5 * (d_in[i] + d_out[i])).collect();
        let ring_r: Vec<f64> = ring_d.iter().map(|d| radius - d).collect();
        let idx = |ring: usize, j: usize| 1 + ring * n_theta + (j % n_theta);

        let n = 1 + n_rings * n_theta;
        let mut coords = vec![[0.0, 0.0]; n];
        let mut volume = vec![PI * core * core; n];
        let mut delta = vec![radius; n];
        let mut normal_width = vec![2.0 * core; n];
        for (ring, &r) in ring_r.iter().enumerate() {
            let w = d_in[ring] - d_out[ring];
            let v = w * r * dtheta;
            for j in 0..n_theta {
                let th = j as f64 * dtheta;
                let k = idx(ring, j);
                coords[k] = [r * th.cos(), r * th.sin()];
                volume[k] = v;
                delta[k] = ring_d[ring];
                normal_width[k] = w;
            }
        }
        let mut links = Vec::new();
        for j in 0..n_theta {
            links.push(Link {
                a: 0,
                b: idx(0, j),
                t: core * dtheta / ring_r[0],
                dist: ring_r[0],
            });
        }
        for ring in 0..n_rings {
            let r = ring_r[ring];
            let dr = d_in[ring] - d_out[ring];
            for j in 0..n_theta {
                links.push(Link {
                    a: idx(ring, j),
                    b: idx(ring, j + 1),
                    t: dr / (r * dtheta),
                    dist: r * dtheta,
                });
                if ring + 1 < n_rings {
                    let d = ring_d[ring] - ring_d[ring + 1];
                    links.push(Link {
                        a: idx(ring, j),
                        b: idx(ring + 1, j),
                        t: (radius - d_out[ring]) * dtheta / d,
                        dist: d,
                    });
                }
            }
        }
        let outer = n_rings - 1;
        let mut boundary_links = Vec::new();
        let mut rays = Vec::new();
        for j in 0..n_theta {
            let th = j as f64 * dtheta;
            let face = [radius * th.cos(), radius * th.sin()];
            boundary_links.push(BoundaryLink {
                node: idx(outer, j),
                t: radius * dtheta / ring_d[outer],
                face,
                physical: true,
            });
            rays.push(Ray {
                boundary: face,
                param: th,
                width: dtheta,
                nodes: (0..n_rings).rev().map(|ring| idx(ring, j)).collect(),
            });
        }
        Grid {
            domain,
            options,
            layout: Layout::Polar { n_rings, n_theta },
            coords,
            volume,
            delta,
            normal_width,
            links,
            boundary_links,
            rays,
            center_node: 0,
        }
    }

    fn tensor(domain: DomainSpec, options: GridOptions, height: f64, half_width: f64) -> Grid {
        let h = height / options.resolution as f64;
        let widths = normal_widths(height, h, options.grading);
        let mut f1 = vec![0.0];
        for w in &widths {
            let last = *f1.last().expect("nonempty");
            f1.push(last + w);
        }
        *f1.last_mut().expect("nonempty") = height;
        let n1 = widths.len();
        let c1: Vec<f64> = (0..n1).map(|i| 0.5 * (f1[i] + f1[i + 1])).collect();
        let mut n2 = options.lateral.unwrap_or(options.resolution);
        if n2 % 2 == 0 {
            n2 += 1;
        }
        let dx2 = 2.0 * half_width / n2 as f64;
        let c2: Vec<f64> = (0..n2)
            .map(|j| -half_width + (j as f64 + 0.5) * dx2)
            .collect();
        let idx = |i1: usize, i2: usize| i2 * n1 + i1;
        let n = n1 * n2;
        let mut coords = vec![[0.0, 0.0]; n];
        let mut volume = vec![0.0; n];
        let mut delta = vec![0.0; n];
        let mut normal_width = vec![0.0; n];
        let mut links = Vec::new();
        let mut boundary_links = Vec::new();
        let mut rays = Vec::new();
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                let k = idx(i1, i2);
                let w1 = f1[i1 + 1] - f1[i1];
                coords[k] = [c1[i1], c2[i2]];
                volume[k] = w1 * dx2;
                delta[k] = c1[i1];
                normal_width[k] = w1;
                if i1 + 1 < n1 {
                    let d = c1[i1 + 1] - c1[i1];
                    links.push(Link {
                        a: k,
                        b: idx(i1 + 1, i2),
                        t: dx2 / d,
                        dist: d,
                    });
                }
                if i2 + 1 < n2 {
                    links.push(Link {
                        a: k,
                        b: idx(i1, i2 + 1),
                        t: w1 / dx2,
                        dist: dx2,
                    });
                }
                if i2 == 0 || i2 + 1 == n2 {
                    let side = if i2 == 0 { -half_width } else { half_width };
                    boundary_links.push(BoundaryLink {
                        node: k,
                        t: w1 / (0.5 * dx2),
                        face: [c1[i1], side],
                        physical: false,
                    });
                }
            }
            boundary_links.push(BoundaryLink {
                node: idx(0, i2),
                t: dx2 / c1[0],
                face: [0.0, c2[i2]],
                physical: true,
            });
            boundary_links.push(BoundaryLink {
                node: idx(n1 - 1, i2),
                t: dx2 / (height - c1[n1 - 1]),
                face: [height, c2[i2]],
                physical: false,
            });
            rays.push(Ray {
                boundary: [0.0, c2[i2]],
                param: c2[i2],
                width: dx2,
                nodes: (0..n1).map(|i1| idx(i1, i2)).collect(),
            });
        }
        let center = idx(
            c1.iter()
                .enumerate()
                .min_by(|a, b| (a.1 - height / 2.0).abs().total_cmp(&(b.1 - height / 2.0).abs()))
                .map(|(i, _)| i)
                .expect("nonempty"),
            n2 / 2,
        );
        Grid {
            domain,
            options,
            layout: Layout::Tensor { n1, n2 },
            coords,
            volume,
            delta,
            normal_width,
            links,
            boundary_links,
            rays,
            center_node: center,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn options(&self) -> &GridOptions {
        &self.options
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volume
    }

    pub fn deltas(&self) -> &[f64] {
        &self.delta
    }

    /// Cell width across the level sets of `δ`.
    pub fn normal_widths(&self) -> &[f64] {
        &self.normal_width
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn boundary_links(&self) -> &[BoundaryLink] {
        &self.boundary_links
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    /// Node used as the Martin normalization point `x₀` (domain center or nearest node).
    pub fn center_node(&self) -> usize {
        self.center_node
    }

    /// Bandwidth of the node ordering.
    pub fn bandwidth(&self) -> usize {
        match self.layout {
            Layout::Polar { n_theta, .. } => n_theta,
            Layout::Tensor { n1, .. } => n1,
        }
    }

    /// `(normal, lateral)` cell counts.
    pub fn shape(&self) -> (usize, usize) {
        match self.layout {
            Layout::Polar { n_rings, n_theta } => (n_rings + 1, n_theta),
            Layout::Tensor { n1, n2 } => (n1, n2),
        }
    }

    /// Smallest node distance to the boundary.
    pub fn min_delta(&self) -> f64 {
        self.delta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Width of the cells touching the physical boundary.
    pub fn boundary_cell_width(&self) -> f64 {
        2.0 * self.min_delta()
    }

    pub fn total_volume(&self) -> f64 {
        self.volume.iter().sum()
    }

    pub fn nearest_node(&self, p: Point) -> (usize, f64) {
        self.coords
            .iter()
            .enumerate()
            .map(|(i, c)| (i, (c[0] - p[0]).hypot(c[1] - p[1])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("grid has nodes")
    }

    /// Node at `p`; off-node points are snapped when `snap` is set.
    pub fn node_at(&self, p: Point, snap: bool) -> Result<usize> {
        self.domain.distance_to_boundary(p)?;
        let (i, d) = self.nearest_node(p);
        if d > 1e-9 * self.domain.reach() && !snap {
            return Err(HardyError::NotANode {
                point: p,
                distance: d,
            });
        }
        Ok(i)
    }

    /// Ray whose boundary cell contains the boundary point nearest to `y`.
    pub fn nearest_ray(&self, y: Point) -> usize {
        self.rays
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (r.boundary[0] - y[0]).hypot(r.boundary[1] - y[1])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
            .expect("grid has rays")
    }

    /// Rays used by trace and kernel probes: all on the disk, the central third on the box.
    pub fn probe_rays(&self) -> Vec<usize> {
        match self.domain.kind {
            DomainKind::Disk { .. } => (0..self.rays.len()).collect(),
            DomainKind::HalfspaceBox { half_width, .. } => self
                .rays
                .iter()
                .enumerate()
                .filter(|(_, r)| r.param.abs() <= half_width / 3.0)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    /// Surface measure of `Σ_β` carried by one ray's cell.
    pub fn levelset_weight(&self, ray: &Ray, beta: f64) -> f64 {
        match self.domain.kind {
            DomainKind::Disk { radius } => (radius - beta) * ray.width,
            DomainKind::HalfspaceBox { .. } => ray.width,
        }
    }

    /// Boundary measure carried by one ray's cell.
    pub fn boundary_weight(&self, ray: &Ray) -> f64 {
        match self.domain.kind {
            DomainKind::Disk { radius } => radius * ray.width,
            DomainKind::HalfspaceBox { .. } => ray.width,
        }
    }

    /// Value of `values` at `δ = β` along a ray, linear in `δ` between nodes.
    /// Below the first node the field is taken to vanish on `∂Ω`.
    pub fn interpolate_on_ray(&self, ray: &Ray, values: &[f64], beta: f64) -> f64 {
        let nodes = &ray.nodes;
        let (mut d0, mut v0) = (0.0, 0.0);
        for &k in nodes {
            let (d1, v1) = (self.delta[k], values[k]);
            if beta <= d1 {
                let s = (beta - d0) / (d1 - d0);
                return v0 + s * (v1 - v0);
            }
            (d0, v0) = (d1, v1);
        }
        v0
    }

    /// `∫_{Σ_β} f dS` for rays selected by `keep`.
    pub fn levelset_integral_where(
        &self,
        beta: f64,
        f: &Field,
        keep: impl Fn(&Ray) -> bool,
    ) -> Result<f64> {
        self.check_field(f)?;
        self.check_level(beta)?;
        Ok(self
            .rays
            .iter()
            .filter(|r| keep(r))
            .map(|r| self.interpolate_on_ray(r, f.values(), beta) * self.levelset_weight(r, beta))
            .sum())
    }

    /// `∫_{Σ_β} f dS` over the whole level set.
    pub fn levelset_integral(&self, beta: f64, f: &Field) -> Result<f64> {
        self.levelset_integral_where(beta, f, |_| true)
    }

    pub fn check_level(&self, beta: f64) -> Result<()> {
        let beta0 = self.domain.beta0;
        if !(beta > 0.0 && beta < beta0) {
            return Err(HardyError::Range {
                what: "beta",
                value: beta,
                lo: 0.0,
                hi: beta0,
            });
        }
        Ok(())
    }

    /// Node mask of a (shrunk) domain on this grid.
    pub fn mask(&self, domain: &DomainSpec) -> Vec<bool> {
        self.delta.iter().map(|&d| d > domain.inset).collect()
    }

    pub fn check_field(&self, f: &Field) -> Result<()> {
        if std::ptr::eq(self, f.grid.as_ref()) {
            Ok(())
        } else {
            Err(HardyError::GridMismatch("field lives on another grid".into()))
        }
    }

    /// Per-node `max |u_a - u_b| / dist` over interior faces.
    pub fn gradient_magnitude(&self, values: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0f64; self.len()];
        for l in &self.links {
            let s = (values[l.a] - values[l.b]).abs() / l.dist;
            g[l.a] = g[l.a].max(s);
            g[l.b] = g[l.b].max(s);
        }
        g
    }
}

/// Scalar function sampled at the nodes of one grid.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(HardyError::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x, δ(x))` at every node.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(Point, f64) -> f64) -> Self {
        let values = grid
            .coords()
            .iter()
            .zip(grid.deltas())
            .map(|(&p, &d)| f(p, d))
            .collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) {
            Ok(())
        } else {
            Err(HardyError::GridMismatch(
                "binary operation between fields on different grids".into(),
            ))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.same_grid(other)?;
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    /// `self + c·other`
    pub fn add_scaled(&self, c: f64, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + c * b)
    }

    pub fn min(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, f64::min)
    }

    pub fn max(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫_Ω f dx` by cell quadrature.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.volumes())
            .map(|(v, w)| v * w)
            .sum()
    }

    /// `∫_Ω f·g dx`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.grid.volumes())
            .map(|((a, b), w)| a * b * w)
            .sum())
    }

    /// `‖f‖_{L^p_{δ^a}} = (∫ |f|^p δ^a dx)^{1/p}`.
    pub fn weighted_norm(&self, p: f64, a: f64) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(self.grid.volumes())
            .zip(self.grid.deltas())
            .map(|((v, w), d)| v.abs().powf(p) * d.powf(a) * w)
            .sum();
        s.powf(1.0 / p)
    }
}

/// `δ(x)` for a domain; see [`DomainSpec::distance_to_boundary`].
pub fn distance_to_boundary(domain: &DomainSpec, p: Point) -> Result<f64> {
    domain.distance_to_boundary(p)
}

/// `σ(x)`; see [`DomainSpec::boundary_projection`].
pub fn boundary_projection(domain: &DomainSpec, p: Point) -> Result<Point> {
    domain.boundary_projection(p)
}

/// `∫_{Σ_β} f dS`; see [`Grid::levelset_integral`].
pub fn levelset_integral(grid: &Grid, beta: f64, f: &Field) -> Result<f64> {
    grid.levelset_integral(beta, f)
}

/// `D_β`; see [`DomainSpec::exhaustion`].
pub fn exhaustion(domain: &DomainSpec, beta: f64) -> Result<DomainSpec> {
    domain.exhaustion(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distances() {
        let d = DomainSpec::disk(1.0);
        assert_eq!(d.distance_to_boundary([0.0, 0.0]).unwrap(), 1.0);
        assert!((d.distance_to_boundary([0.7, 0.0]).unwrap() - 0.3).abs() < 1e-15);
        assert!(d.distance_to_boundary([1.1, 0.0]).is_err());
        let b = DomainSpec::halfspace_box(1.0, 1.0);
        assert_eq!(b.distance_to_boundary([0.25, 0.9]).unwrap(), 0.25);
        assert!(b.distance_to_boundary([-0.1, 0.0]).is_err());
    }

    #[test]
    fn projections() {
        let d = DomainSpec::disk(1.0);
        assert_eq!(d.boundary_projection([0.5, 0.0]).unwrap(), [1.0, 0.0]);
        assert!(matches!(
            d.boundary_projection([0.4, 0.0]),
            Err(HardyError::Collar { .. })
        ));
        let b = DomainSpec::halfspace_box(1.0, 1.0);
        assert_eq!(b.boundary_projection([0.1, 0.3]).unwrap(), [0.0, 0.3]);
    }

    proptest! {
        #[test]
        fn disk_projection_lands_on_circle(r in 0.5001f64..0.9999, th in 0.0f64..6.283) {
            let d = DomainSpec::disk(1.0);
            let p = [r * th.cos(), r * th.sin()];
            let s = d.boundary_projection(p).unwrap();
            prop_assert!((s[0].hypot(s[1]) - 1.0).abs() < 1e-12);
            let dist = (p[0] - s[0]).hypot(p[1] - s[1]);
            prop_assert!((dist - d.distance_to_boundary(p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_nodes_project_within_collar() {
        for domain in [DomainSpec::disk(1.0), DomainSpec::halfspace_box(1.0, 1.0)] {
            let g = Grid::new(domain, GridOptions::graded(32)).unwrap();
            for (p, &dl) in g.coords().iter().zip(g.deltas()) {
                // δ comes from the mesh construction; coordinates near the
                // circle carry absolute round-off only.
                let from_coords = domain.distance_to_boundary(*p).unwrap();
                assert!((from_coords - dl).abs() <= 4.0 * f64::EPSILON, "{from_coords} {dl}");
                if dl < domain.beta0 {
                    let s = domain.boundary_projection(*p).unwrap();
                    assert!(((p[0] - s[0]).hypot(p[1] - s[1]) - dl).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cells_cover_the_domain_and_nodes_are_interior() {
        for opts in [GridOptions::uniform(64), GridOptions::graded(64)] {
            for domain in [DomainSpec::disk(1.0), DomainSpec::halfspace_box(1.0, 1.0)] {
                let g = Grid::new(domain, opts).unwrap();
                let rel = (g.total_volume() - domain.volume()).abs() / domain.volume();
                assert!(rel < 5e-3, "{rel}");
                // cell-centered: each node sits at least half a boundary cell inside
                assert!(g.min_delta() > 0.0);
                for bl in g.boundary_links() {
                    if bl.physical {
                        let d = g.deltas()[bl.node];
                        assert!(d >= 0.5 * g.boundary_cell_width() - 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn levelset_of_one() {
        let g = Grid::new(DomainSpec::disk(1.0), GridOptions::uniform(64)).unwrap();
        let one = Field::constant(&g, 1.0);
        let v = g.levelset_integral(0.25, &one).unwrap();
        assert!((v - 2.0 * PI * 0.75).abs() < 5e-3 * 2.0 * PI * 0.75);
        assert!(g.levelset_integral(0.5, &one).is_err());
        assert!(g.levelset_integral(0.0, &one).is_err());
        let b = Grid::new(DomainSpec::halfspace_box(1.0, 1.0), GridOptions::graded(64)).unwrap();
        let one = Field::constant(&b, 1.0);
        for beta in [0.01, 0.1, 0.3] {
            assert!((b.levelset_integral(beta, &one).unwrap() - 2.0).abs() < 1e-2);
        }
    }

    #[test]
    fn exhaustion_shrinks_and_nests() {
        let d = DomainSpec::disk(1.0);
        let e = d.exhaustion(0.25).unwrap();
        assert_eq!(e.effective_kind(), DomainKind::Disk { radius: 0.75 });
        assert!(d.exhaustion(0.5).is_err());
        assert!(d.exhaustion(0.0).is_err());
        let g = Grid::new(d, GridOptions::uniform(32)).unwrap();
        let m1 = g.mask(&d.exhaustion(0.1).unwrap());
        let m2 = g.mask(&d.exhaustion(0.2).unwrap());
        assert!(m1.iter().zip(&m2).all(|(a, b)| *a || !*b));
        assert!(m1.iter().filter(|x| **x).count() > m2.iter().filter(|x| **x).count());
        // |Ω \ D_β| / β → 2πR as β → 0
        for beta in [1e-2, 1e-3] {
            let lost = d.volume() - d.exhaustion(beta).unwrap().effective_volume();
            assert!((lost / beta - 2.0 * PI).abs() < 2.0 * PI * beta);
        }
    }

    #[test]
    fn field_arithmetic_requires_same_grid() {
        let g1 = Grid::new(DomainSpec::disk(1.0), GridOptions::uniform(8)).unwrap();
        let g2 = Grid::new(DomainSpec::disk(1.0), GridOptions::uniform(8)).unwrap();
        let a = Field::constant(&g1, 1.0);
        let b = Field::constant(&g2, 2.0);
        assert!(a.add(&b).is_err());
        assert!(Field::new(&g1, vec![0.0; 3]).is_err());
        let c = a.add(&a).unwrap();
        assert!((c.integral() - 2.0 * g1.total_volume()).abs() < 1e-12);
    }
}
