//! Experiment configuration: one JSON document with every default filled in.

use std::path::Path;

use hardy_core::{Atom, BoundaryDensity, BoundaryMeasure, DomainKind, DomainSpec, GridOptions, InteriorMeasure, Point};
use serde::{Deserialize, Serialize};

// `deny_unknown_fields` does not combine with the flattened domain kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainConfig {
    /// `None` only between parsing and [`load`], which fills in the unit disk.
    #[serde(flatten)]
    pub kind: Option<DomainKind>,
    pub dim: usize,
    pub resolution: usize,
    /// Angular (disk) or lateral (box) cells; defaults to the grid's own choice.
    pub lateral: Option<usize>,
    pub graded: bool,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self {
            kind: Some(UNIT_DISK),
            dim: 2,
            resolution: 64,
            lateral: None,
            graded: true,
        }
    }
}

const UNIT_DISK: DomainKind = DomainKind::Disk { radius: 1.0 };

impl DomainConfig {
    pub fn spec(&self) -> DomainSpec {
        let base = match self.kind.unwrap_or(UNIT_DISK) {
            DomainKind::Disk { radius } => DomainSpec::disk(radius),
            DomainKind::HalfspaceBox { height, half_width } => DomainSpec::halfspace_box(height, half_width),
        };
        base.with_dim(self.dim)
    }

    pub fn grid_options(&self) -> GridOptions {
        let o = if self.graded {
            GridOptions::graded(self.resolution)
        } else {
            GridOptions::uniform(self.resolution)
        };
        match self.lateral {
            Some(n) => o.with_lateral(n),
            None => o,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub mu: f64,
    pub q: f64,
    pub shift: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            mu: 0.1875,
            q: 2.0,
            shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub tau_atoms: Vec<Atom>,
    /// Constant interior density.
    pub tau_density: Option<f64>,
    pub nu_atoms: Vec<Atom>,
    pub nu_density: Option<BoundaryDensity>,
    /// Mass and pole of the Dirac experiments `ν = kδ_y`.
    pub k: f64,
    pub y: Point,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            tau_atoms: Vec::new(),
            tau_density: None,
            nu_atoms: vec![Atom::new([1.0, 0.0], 1.0)],
            nu_density: None,
            k: 1.0,
            y: [1.0, 0.0],
        }
    }
}

impl DataConfig {
    pub fn nu(&self) -> BoundaryMeasure {
        BoundaryMeasure {
            atoms: self.nu_atoms.clone(),
            density: self.nu_density.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Exhaustion levels of the semilinear solver.
    pub levels: usize,
    /// Levels of the trace ladders.
    pub trace_levels: usize,
    pub newton_tol: f64,
    pub picard_tol: f64,
    pub residual_tol: f64,
    /// Samples on the normal ray for the Dirac profile.
    pub samples: usize,
    /// Exponents for `critical-scan`.
    pub q_list: Vec<f64>,
    /// Cone aperture of the truncated integral.
    pub gamma: f64,
    pub seed: u64,
    pub output: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            levels: hardy_core::nonlinear::DEFAULT_LEVELS,
            trace_levels: hardy_core::trace::DEFAULT_LEVELS,
            newton_tol: 1e-12,
            picard_tol: 1e-10,
            residual_tol: 1e-3,
            samples: 10,
            q_list: vec![2.0, 3.0, 3.5, 11.0 / 3.0, 4.0],
            gamma: 0.5,
            seed: 1,
            output: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub physics: PhysicsConfig,
    pub data: DataConfig,
    pub run: RunConfig,
}

pub fn load(path: Option<&Path>) -> Result<ExperimentConfig, String> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let mut c: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?;
            c.domain.kind.get_or_insert(UNIT_DISK);
            Ok(c)
        }
    }
}

fn positive(what: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{what} = {v} must be positive and finite"))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        let spec = self.domain.spec();
        spec.validate().map_err(|e| e.to_string())?;
        if self.domain.resolution < 4 {
            return Err(format!("resolution {} is below 4", self.domain.resolution));
        }
        let p = &self.physics;
        if !(p.mu.is_finite() && p.mu >= 0.0) {
            return Err(format!("mu = {} must be finite and nonnegative", p.mu));
        }
        if !(p.q > 1.0 && p.q.is_finite()) {
            return Err(format!("q = {} must be finite and above 1", p.q));
        }
        if !p.shift.is_finite() {
            return Err("shift must be finite".into());
        }
        for a in &self.data.tau_atoms {
            if !spec.contains(a.point) {
                return Err(format!("interior atom {:?} lies outside the domain", a.point));
            }
        }
        if self.data.tau_density.is_some_and(|c| !(c.is_finite() && c >= 0.0)) {
            return Err("tau_density must be finite and nonnegative".into());
        }
        self.data.nu().validate(&spec).map_err(|e| e.to_string())?;
        BoundaryMeasure::dirac(self.data.y, 1.0)
            .validate(&spec)
            .map_err(|e| format!("y: {e}"))?;
        positive("k", self.data.k)?;
        let r = &self.run;
        for (what, v) in [
            ("newton_tol", r.newton_tol),
            ("picard_tol", r.picard_tol),
            ("residual_tol", r.residual_tol),
        ] {
            positive(what, v)?;
        }
        if !(r.gamma > 0.0 && r.gamma < 1.0) {
            return Err(format!("gamma = {} must lie in (0, 1)", r.gamma));
        }
        if r.levels == 0 || r.trace_levels < 2 || r.samples < 2 {
            return Err("levels, trace_levels and samples are too small".into());
        }
        if r.q_list.iter().any(|q| !(*q > 1.0 && q.is_finite())) {
            return Err("every q in q_list must be finite and above 1".into());
        }
        Ok(())
    }

    /// Interior measure from the data block; atoms are snapped to nodes.
    pub fn tau(&self, grid: &std::sync::Arc<hardy_core::Grid>) -> InteriorMeasure {
        let atoms = self
            .data
            .tau_atoms
            .iter()
            .map(|a| Atom::new(grid.coords()[grid.nearest_node(a.point).0], a.mass))
            .collect();
        let density = self.data.tau_density.and_then(|c| InteriorMeasure::uniform(grid, c).density);
        InteriorMeasure { atoms, density }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"physics": {"mu": 0.1}}"#).unwrap();
        assert_eq!(c.physics.mu, 0.1);
        assert_eq!(c.physics.q, 2.0);
        assert_eq!(c.domain.resolution, 64);
        let c: ExperimentConfig = serde_json::from_str(r#"{"domain": {"lateral": 64}}"#).unwrap();
        assert_eq!(c.domain.lateral, Some(64));
        assert_eq!(c.domain.spec(), DomainSpec::disk(1.0));
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = ExperimentConfig::default();
        c.data.tau_atoms.push(Atom::new([2.0, 0.0], 1.0));
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.run.newton_tol = 0.0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.data.y = [0.5, 0.0];
        assert!(c.validate().is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"physics": {"nu": 1}}"#).is_err());
    }
}
