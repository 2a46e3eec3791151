//! Interior measures `τ` and boundary measures `ν`: atoms plus densities.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{HardyError, Result};
use crate::geometry::{DomainKind, DomainSpec, Field, Grid, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Point,
    pub mass: f64,
}

impl Atom {
    pub fn new(point: Point, mass: f64) -> Self {
        Self { point, mass }
    }
}

fn check_masses(atoms: &[Atom]) -> Result<()> {
    for a in atoms {
        if !(a.mass > 0.0 && a.mass.is_finite()) {
            return Err(HardyError::Parameter(format!(
                "atom mass {} must be positive",
                a.mass
            )));
        }
    }
    Ok(())
}

/// Nonnegative measure on `Ω`: point masses plus a density sampled at the nodes.
#[derive(Debug, Clone, Default)]
pub struct InteriorMeasure {
    pub atoms: Vec<Atom>,
    pub density: Option<Field>,
}

impl InteriorMeasure {
    pub fn dirac(point: Point, mass: f64) -> Self {
        Self {
            atoms: vec![Atom::new(point, mass)],
            density: None,
        }
    }

    pub fn from_density(density: Field) -> Self {
        Self {
            atoms: Vec::new(),
            density: Some(density),
        }
    }

    /// Lebesgue measure times `c`.
    pub fn uniform(grid: &std::sync::Arc<Grid>, c: f64) -> Self {
        Self::from_density(Field::constant(grid, c))
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        check_masses(&self.atoms)?;
        for a in &self.atoms {
            if !grid.domain().contains(a.point) {
                return Err(HardyError::Domain(format!(
                    "atom {:?} not inside the domain",
                    a.point
                )));
            }
        }
        if let Some(d) = &self.density {
            grid.check_field(d)?;
            if d.values().iter().any(|v| *v < 0.0 || !v.is_finite()) {
                return Err(HardyError::Parameter("density must be nonnegative".into()));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(a.point, c * a.mass))
                .collect(),
            density: self.density.as_ref().map(|d| d.scale(c)),
        }
    }

    /// `∫ δ^α dτ`: exact at atoms, cell quadrature for the density.
    pub fn weighted_mass(&self, grid: &Grid, alpha: f64) -> Result<f64> {
        self.validate(grid)?;
        let mut m = 0.0;
        for a in &self.atoms {
            m += a.mass * grid.domain().distance_to_boundary(a.point)?.powf(alpha);
        }
        if let Some(d) = &self.density {
            m += d
                .values()
                .iter()
                .zip(grid.volumes())
                .zip(grid.deltas())
                .map(|((f, v), dl)| f * v * dl.powf(alpha))
                .sum::<f64>();
        }
        Ok(m)
    }

    /// `τ`-mass carried by each node; atoms go to their nearest node.
    pub fn node_masses(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.validate(grid)?;
        let mut w = match &self.density {
            Some(d) => d
                .values()
                .iter()
                .zip(grid.volumes())
                .map(|(f, v)| f * v)
                .collect(),
            None => vec![0.0; grid.len()],
        };
        for a in &self.atoms {
            w[grid.nearest_node(a.point).0] += a.mass;
        }
        Ok(w)
    }
}

/// `∫ δ^α dτ`.
pub fn weighted_mass(tau: &InteriorMeasure, grid: &Grid, alpha: f64) -> Result<f64> {
    tau.weighted_mass(grid, alpha)
}

/// Density on `∂Ω`, piecewise constant on equal cells of the boundary
/// parameter (angle on `[0, 2π)` for the disk, `x₂ ∈ [-W, W]` for the box).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDensity {
    pub values: Vec<f64>,
}

impl BoundaryDensity {
    pub fn uniform(c: f64) -> Self {
        Self { values: vec![c] }
    }

    fn range(domain: &DomainSpec) -> (f64, f64) {
        match domain.kind {
            DomainKind::Disk { .. } => (0.0, 2.0 * PI),
            DomainKind::HalfspaceBox { half_width, .. } => (-half_width, half_width),
        }
    }

    /// Density at boundary parameter `s`.
    pub fn at(&self, domain: &DomainSpec, s: f64) -> f64 {
        let (lo, hi) = Self::range(domain);
        let n = self.values.len();
        let t = match domain.kind {
            DomainKind::Disk { .. } => s.rem_euclid(2.0 * PI),
            _ => s,
        };
        let k = (((t - lo) / (hi - lo)) * n as f64).floor();
        self.values[(k.max(0.0) as usize).min(n - 1)]
    }

    /// `∫_{∂Ω} f dS` exactly.
    pub fn total(&self, domain: &DomainSpec) -> f64 {
        let (lo, hi) = Self::range(domain);
        let metric = match domain.kind {
            DomainKind::Disk { radius } => radius,
            DomainKind::HalfspaceBox { .. } => 1.0,
        };
        let cell = (hi - lo) / self.values.len() as f64;
        self.values.iter().sum::<f64>() * cell * metric
    }
}

/// Nonnegative finite measure on `∂Ω`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryMeasure {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub density: Option<BoundaryDensity>,
}

impl BoundaryMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(point: Point, mass: f64) -> Self {
        Self {
            atoms: vec![Atom::new(point, mass)],
            density: None,
        }
    }

    pub fn from_density(density: BoundaryDensity) -> Self {
        Self {
            atoms: Vec::new(),
            density: Some(density),
        }
    }

    /// `mass` split evenly over `pieces` atoms at the midpoints of equal
    /// sub-arcs of the boundary arc of parameter width `width` centered at `s0`.
    pub fn mollified_dirac(domain: &DomainSpec, s0: f64, width: f64, mass: f64, pieces: usize) -> Self {
        let n = pieces.max(1);
        let atoms = (0..n)
            .map(|i| {
                let s = s0 - 0.5 * width + (i as f64 + 0.5) * width / n as f64;
                Atom::new(domain.boundary_point(s), mass / n as f64)
            })
            .collect();
        Self {
            atoms,
            density: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
            && self
                .density
                .as_ref()
                .is_none_or(|d| d.values.iter().all(|v| *v == 0.0))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(a.point, c * a.mass))
                .collect(),
            density: self.density.as_ref().map(|d| BoundaryDensity {
                values: d.values.iter().map(|v| c * v).collect(),
            }),
        }
    }

    pub fn plus(&self, other: &BoundaryMeasure) -> Result<BoundaryMeasure> {
        let density = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => {
                if a.values.len() != b.values.len() {
                    return Err(HardyError::Parameter(
                        "boundary densities on different partitions".into(),
                    ));
                }
                Some(BoundaryDensity {
                    values: a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect(),
                })
            }
        };
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Ok(BoundaryMeasure { atoms, density })
    }

    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        check_masses(&self.atoms)?;
        for a in &self.atoms {
            let d = domain.distance_to_boundary(a.point)?;
            if d > 1e-9 * domain.reach() {
                return Err(HardyError::Domain(format!(
                    "boundary atom {:?} is {d} away from the boundary",
                    a.point
                )));
            }
        }
        if let Some(d) = &self.density {
            if d.values.is_empty() || d.values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                return Err(HardyError::Parameter(
                    "boundary density must be a nonempty nonnegative array".into(),
                ));
            }
        }
        Ok(())
    }

    /// `‖ν‖ = Σ m + ∫ f dS`.
    pub fn total_variation(&self, domain: &DomainSpec) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>()
            + self.density.as_ref().map_or(0.0, |d| d.total(domain))
    }

    /// Mass carried by each grid ray: atoms go to the nearest ray, the density
    /// is integrated with the ray's boundary cell.
    pub fn ray_masses(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.validate(grid.domain())?;
        let mut m = vec![0.0; grid.rays().len()];
        if let Some(d) = &self.density {
            for (mi, ray) in m.iter_mut().zip(grid.rays()) {
                *mi += d.at(grid.domain(), ray.param) * grid.boundary_weight(ray);
            }
        }
        for a in &self.atoms {
            m[grid.nearest_ray(a.point)] += a.mass;
        }
        Ok(m)
    }
}

/// Lebesgue measure with weight `δ^β`, as node masses.
pub fn weighted_lebesgue(grid: &Grid, beta: f64) -> Vec<f64> {
    grid.volumes()
        .iter()
        .zip(grid.deltas())
        .map(|(v, d)| v * d.powf(beta))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridOptions;

    #[test]
    fn single_atom_weighted_mass() {
        let g = Grid::new(DomainSpec::disk(1.0), GridOptions::uniform(16)).unwrap();
        let t = InteriorMeasure::dirac([0.5, 0.0], 1.0);
        assert!((t.weighted_mass(&g, 0.75).unwrap() - 0.5f64.powf(0.75)).abs() < 1e-15);
        let t = InteriorMeasure::dirac([0.1, 0.2], 3.0);
        assert_eq!(t.weighted_mass(&g, 0.0).unwrap(), 3.0);
    }

    #[test]
    fn uniform_density_weighted_mass() {
        let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(128)).unwrap();
        let t = InteriorMeasure::uniform(&g, 1.0);
        let m = t.weighted_mass(&g, 1.0).unwrap();
        assert!((m - PI / 3.0).abs() < 1e-3 * PI / 3.0, "{m}");
    }

    #[test]
    fn boundary_totals() {
        let d = DomainSpec::disk(1.0);
        let nu = BoundaryMeasure::from_density(BoundaryDensity::uniform(1.0));
        assert!((nu.total_variation(&d) - 2.0 * PI).abs() < 1e-12);
        let g = Grid::new(d, GridOptions::uniform(32)).unwrap();
        let m: f64 = nu.ray_masses(&g).unwrap().iter().sum();
        assert!((m - 2.0 * PI).abs() < 1e-12);
        let nu = BoundaryMeasure::dirac([0.0, 1.0], 2.0);
        assert_eq!(nu.total_variation(&d), 2.0);
        assert!(BoundaryMeasure::dirac([0.0, 0.9], 1.0).validate(&d).is_err());
        assert!(BoundaryMeasure::dirac([0.0, 1.0], -1.0).validate(&d).is_err());
    }
}
