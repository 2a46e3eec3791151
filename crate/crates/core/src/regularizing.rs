//! Weak-`L^p` regularizing estimates for `𝔾` and `𝕂`.
//!
//! Three estimates bound a weak norm of a potential by a norm of its measure:
//!
//! | potential | exponent `p`          | weight        | measure norm         | range        |
//! |-----------|-----------------------|---------------|----------------------|--------------|
//! | `𝔾[τ]`    | `(N+β)/(N-2)`         | `δ^β`         | `‖τ‖`                | `β > -1`     |
//! | `𝔾[τ]`    | `(N+β)/(N-2α-)`       | `δ^{β-α+}`    | `∫δ^{α+} d|τ|`       | `β > -2α-`   |
//! | `𝕂[ν]`    | `(N+β)/(N-1-α-)`      | `δ^β`         | `‖ν‖`                | `β > -1`     |
//!
//! For `N = 2` the first exponent is infinite and that row is skipped.
//! The constants are uniform in the measure, so the ratios over a family of
//! measures should stay within a bounded spread.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::geometry::Grid;
use crate::kernels::Kernels;
use crate::measures::{weighted_lebesgue, BoundaryDensity, BoundaryMeasure, InteriorMeasure};
use crate::weaklp::weak_norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    Green,
    Martin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureNorm {
    Total,
    /// `∫ δ^{α+} d|τ|`.
    WeightedAlphaPlus,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentPair {
    pub label: &'static str,
    pub potential: Potential,
    pub p: f64,
    /// Exponent `a` of the reference measure `δ^a dx`.
    pub weight: f64,
    pub norm: MeasureNorm,
}

/// The admissible exponent pairs at `β` for dimension `dim`; infinite
/// exponents are dropped and reported by label.
pub fn exponent_pairs(
    alpha_plus: f64,
    alpha_minus: f64,
    dim: usize,
    beta: f64,
) -> Result<(Vec<ExponentPair>, Vec<&'static str>)> {
    if !(beta > -1.0) || !(beta > -2.0 * alpha_minus) {
        return Err(HardyError::Range {
            what: "beta",
            value: beta,
            lo: (-1.0f64).max(-2.0 * alpha_minus),
            hi: f64::INFINITY,
        });
    }
    let n = dim as f64;
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    if dim > 2 {
        pairs.push(ExponentPair {
            label: "green_total",
            potential: Potential::Green,
            p: (n + beta) / (n - 2.0),
            weight: beta,
            norm: MeasureNorm::Total,
        });
    } else {
        skipped.push("green_total");
    }
    pairs.push(ExponentPair {
        label: "green_weighted",
        potential: Potential::Green,
        p: (n + beta) / (n - 2.0 * alpha_minus),
        weight: beta - alpha_plus,
        norm: MeasureNorm::WeightedAlphaPlus,
    });
    pairs.push(ExponentPair {
        label: "martin",
        potential: Potential::Martin,
        p: (n + beta) / (n - 1.0 - alpha_minus),
        weight: beta,
        norm: MeasureNorm::Total,
    });
    for pr in &pairs {
        if !(pr.p > 1.0 && pr.p.is_finite()) {
            return Err(HardyError::Parameter(format!("exponent {} = {} is not in (1, ∞)", pr.label, pr.p)));
        }
    }
    Ok((pairs, skipped))
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub pair: ExponentPair,
    /// `(measure label, weak norm / measure norm)`.
    pub ratios: Vec<(String, f64)>,
    pub max_ratio: f64,
    /// `max / min` over the family.
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularizingReport {
    pub mu: f64,
    pub beta: f64,
    pub pairs: Vec<PairReport>,
    pub skipped: Vec<&'static str>,
}

impl RegularizingReport {
    pub fn max_spread(&self) -> f64 {
        self.pairs.iter().map(|p| p.spread).fold(0.0, f64::max)
    }
}

pub type InteriorFamily = Vec<(String, InteriorMeasure)>;
pub type BoundaryFamily = Vec<(String, BoundaryMeasure)>;

/// Dirac at the center node, Dirac at the node nearest depth `β₀/4`, and
/// Lebesgue measure; Dirac at a boundary point, the average of two antipodal
/// Diracs, and the uniform boundary density.
pub fn standard_families(grid: &Arc<Grid>) -> (InteriorFamily, BoundaryFamily) {
    let d = grid.domain();
    let center = grid.coords()[grid.center_node()];
    let s0 = grid.rays()[0].param;
    let shallow = grid.coords()[grid.nearest_node(d.point_at(s0, d.beta0 / 4.0)).0];
    let y = grid.rays()[0].boundary;
    let far = grid.rays()[grid.rays().len() / 2].boundary;
    let taus = vec![
        ("dirac_center".to_string(), InteriorMeasure::dirac(center, 1.0)),
        ("dirac_shallow".to_string(), InteriorMeasure::dirac(shallow, 1.0)),
        ("lebesgue".to_string(), InteriorMeasure::uniform(grid, 1.0)),
    ];
    let pair = BoundaryMeasure::dirac(y, 0.5)
        .plus(&BoundaryMeasure::dirac(far, 0.5))
        .expect("atoms only");
    let nus = vec![
        ("dirac".to_string(), BoundaryMeasure::dirac(y, 1.0)),
        ("dirac_pair".to_string(), pair),
        ("uniform".to_string(), BoundaryMeasure::from_density(BoundaryDensity::uniform(1.0))),
    ];
    (taus, nus)
}

fn summarize(pair: ExponentPair, ratios: Vec<(String, f64)>) -> PairReport {
    let max = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let min = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    PairReport {
        pair,
        ratios,
        max_ratio: max,
        spread: max / min,
    }
}

/// Ratios weak norm / measure norm for every admissible pair and measure.
pub fn verify_regularizing_estimates(
    kernels: &Kernels,
    taus: &[(String, InteriorMeasure)],
    nus: &[(String, BoundaryMeasure)],
    beta: f64,
) -> Result<RegularizingReport> {
    let grid = kernels.grid();
    let e = *kernels.exponents();
    let (pairs, skipped) = exponent_pairs(e.alpha_plus, e.alpha_minus, grid.domain().ambient_dim, beta)?;
    let greens = taus
        .iter()
        .map(|(_, t)| kernels.greens_potential(t))
        .collect::<Result<Vec<_>>>()?;
    let martins = nus
        .iter()
        .map(|(_, n)| kernels.martin_integral(n))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for pair in pairs {
        let w = weighted_lebesgue(grid, pair.weight);
        let mut ratios = Vec::new();
        match pair.potential {
            Potential::Green => {
                for ((label, t), u) in taus.iter().zip(&greens) {
                    let m = match pair.norm {
                        MeasureNorm::Total => t.weighted_mass(grid, 0.0)?,
                        MeasureNorm::WeightedAlphaPlus => t.weighted_mass(grid, e.alpha_plus)?,
                    };
                    ratios.push((label.clone(), weak_norm(u.values(), &w, pair.p) / m));
                }
            }
            Potential::Martin => {
                for ((label, n), u) in nus.iter().zip(&martins) {
                    let m = n.total_variation(grid.domain());
                    ratios.push((label.clone(), weak_norm(u.values(), &w, pair.p) / m));
                }
            }
        }
        out.push(summarize(pair, ratios));
    }
    Ok(RegularizingReport {
        mu: kernels.mu(),
        beta,
        pairs: out,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_exponents() {
        let (pairs, skipped) = exponent_pairs(0.75, 0.25, 2, 0.0).unwrap();
        assert_eq!(skipped, vec!["green_total"]);
        assert!((pairs[0].p - 4.0 / 3.0).abs() < 1e-15);
        assert!((pairs[1].p - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(pairs[0].weight, -0.75);
    }

    #[test]
    fn classical_poisson_exponent() {
        let (pairs, _) = exponent_pairs(1.0, 0.0, 3, 0.5).unwrap();
        let k = pairs.iter().find(|p| p.potential == Potential::Martin).unwrap();
        assert!((k.p - 3.5 / 2.0).abs() < 1e-15);
        assert!((pairs[0].p - 3.5).abs() < 1e-15);
    }

    #[test]
    fn inadmissible_beta() {
        assert!(exponent_pairs(0.75, 0.25, 2, -1.0).is_err());
        assert!(exponent_pairs(0.6, 0.4, 2, -0.7).is_ok());
        assert!(exponent_pairs(0.75, 0.25, 2, -0.6).is_err());
    }
}
