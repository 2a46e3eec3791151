//! Normalized boundary traces.
//!
//! For a level `β` the normalized mass and deviation are
//!
//! ```text
//! M(β) = β^{-α-} ∫_{Σ_β} u dS,        T(β) = β^{-α-} ∫_{Σ_β} |u - 𝕂[ν]| dS,
//! ```
//!
//! with `Σ_β = {δ = β}`. A field has normalized trace `ν` when `T(β) → 0`.
//! On a finite ladder `β_j = β₀ 2^{-j}` this limit is judged by the fitted
//! decay exponent of `T` and by the ratio of its last to its first value.
//! The level `j = 0` is `Σ_{β₀}`, the edge of the collar, and is left out.

use std::io::Write;

use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::geometry::{Field, Grid, Point};
use crate::kernels::Kernels;
use crate::measures::BoundaryMeasure;
use crate::spectral::least_squares_slope;

/// Ladder depth for mass brackets.
pub const DEFAULT_LEVELS: usize = 6;
/// Ladder depth for classification. A field decaying like `β^{α+-α-}` with
/// `α+ - α- = 1/2` needs ten halvings to fall below [`RESIDUAL_FACTOR`].
pub const CLASSIFY_LEVELS: usize = 11;
/// Deepest ladder used by [`classify_levels`].
pub const MAX_LEVELS: usize = 40;
/// Smallest fitted exponent that counts as decay.
pub const MIN_DECAY: f64 = 0.1;
/// Largest `T(β_J)/T(β_1)` that counts as decay.
pub const RESIDUAL_FACTOR: f64 = 0.05;
/// `T(β_J)/T(β_1)` at or above which a non-decaying ladder is bounded below.
pub const BOUNDED_FACTOR: f64 = 0.5;
/// Values below this multiple of the field's own mass are zero.
pub const EXACT_FACTOR: f64 = 1e-12;

/// Classification depth for the given exponents: deep enough that a field
/// decaying like `β^{α+-α-}` falls below [`RESIDUAL_FACTOR`], and at least
/// [`CLASSIFY_LEVELS`].
pub fn classify_levels(alpha_plus: f64, alpha_minus: f64) -> usize {
    let gap = alpha_plus - alpha_minus;
    if !(gap > 0.0) {
        return MAX_LEVELS;
    }
    let needed = ((1.0 / RESIDUAL_FACTOR).log2() / gap).ceil() as usize + 2;
    needed.clamp(CLASSIFY_LEVELS, MAX_LEVELS)
}

/// `β₀ 2^{-j}` for `j = 1..=levels`.
pub fn ladder(beta0: f64, levels: usize) -> Vec<f64> {
    (1..=levels).map(|j| beta0 * 0.5f64.powi(j as i32)).collect()
}

/// `M(β) = β^{-α-} ∫_{Σ_β} u dS`.
pub fn trace_mass(u: &Field, alpha_minus: f64, beta: f64) -> Result<f64> {
    Ok(beta.powf(-alpha_minus) * u.grid().levelset_integral(beta, u)?)
}

/// `M(β)` restricted to rays whose foot lies at distance `≥ r0` from `y`.
pub fn far_field_mass(u: &Field, alpha_minus: f64, beta: f64, y: Point, r0: f64) -> Result<f64> {
    let far = |r: &crate::geometry::Ray| (r.boundary[0] - y[0]).hypot(r.boundary[1] - y[1]) >= r0;
    Ok(beta.powf(-alpha_minus) * u.grid().levelset_integral_where(beta, u, far)?)
}

/// `β^{-α-} ∫_{Σ_β} |u - reference| dS`.
pub fn deviation(u: &Field, reference: &Field, alpha_minus: f64, beta: f64) -> Result<f64> {
    let d = u.sub(reference)?.map(f64::abs);
    trace_mass(&d, alpha_minus, beta)
}

/// `T(β)` for the candidate trace `ν`.
pub fn trace_deviation(kernels: &Kernels, u: &Field, nu: &BoundaryMeasure, beta: f64) -> Result<f64> {
    let k = kernels.martin_integral(nu)?;
    deviation(u, &k, kernels.exponents().alpha_minus, beta)
}

/// Slope of `ln v` against `ln β`; `None` if some value is not positive.
pub fn decay_exponent(ladder: &[f64], values: &[f64]) -> Option<f64> {
    if values.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let x: Vec<f64> = ladder.iter().map(|b| b.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    least_squares_slope(&x, &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderStatus {
    /// Zero up to [`EXACT_FACTOR`] on every level.
    Exact,
    Decays,
    BoundedBelow,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    TraceEqualsCandidate,
    TraceZero,
    NoDecay,
    Inconclusive,
}

/// Classification of one `T` ladder. `scale` is the size of the field being
/// classified, so the status is unchanged when field and candidate are scaled
/// together.
pub fn ladder_status(ladder: &[f64], values: &[f64], scale: f64) -> LadderStatus {
    let (first, last) = match (values.first(), values.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return LadderStatus::Undecided,
    };
    if values.iter().all(|v| v.abs() <= EXACT_FACTOR * scale) {
        return LadderStatus::Exact;
    }
    match decay_exponent(ladder, values) {
        Some(s) if s >= MIN_DECAY && last <= RESIDUAL_FACTOR * first => LadderStatus::Decays,
        Some(s) if s < MIN_DECAY && last >= BOUNDED_FACTOR * first => LadderStatus::BoundedBelow,
        _ => LadderStatus::Undecided,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateLadder {
    pub label: String,
    pub values: Vec<f64>,
    pub exponent: Option<f64>,
    pub status: LadderStatus,
}

impl CandidateLadder {
    fn new(label: String, ladder: &[f64], values: Vec<f64>, scale: f64) -> Self {
        Self {
            label,
            exponent: decay_exponent(ladder, &values),
            status: ladder_status(ladder, &values, scale),
            values,
        }
    }

    fn vanishes(&self) -> bool {
        matches!(self.status, LadderStatus::Exact | LadderStatus::Decays)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub alpha_minus: f64,
    pub ladder: Vec<f64>,
    /// `T` for `ν = 0`, i.e. `M(β)` of the field.
    pub zero: CandidateLadder,
    pub candidates: Vec<CandidateLadder>,
    pub verdict: Verdict,
    /// Index of the matching candidate when the verdict is `trace_equals_candidate`.
    pub matched: Option<usize>,
}

/// Verdict from the candidate statuses.
pub fn verdict_of(zero: &CandidateLadder, candidates: &[CandidateLadder]) -> (Verdict, Option<usize>) {
    let hits: Vec<usize> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.vanishes())
        .map(|(i, _)| i)
        .collect();
    match hits.as_slice() {
        [i] => (Verdict::TraceEqualsCandidate, Some(*i)),
        [_, _, ..] => (Verdict::Inconclusive, None),
        [] if zero.vanishes() => (Verdict::TraceZero, None),
        [] if zero.status == LadderStatus::BoundedBelow
            && candidates.iter().all(|c| c.status == LadderStatus::BoundedBelow) =>
        {
            (Verdict::NoDecay, None)
        }
        [] => (Verdict::Inconclusive, None),
    }
}

impl TraceReport {
    /// Recomputes statuses and verdict from the recorded values.
    pub fn rederive(&self) -> (Verdict, Option<usize>) {
        let scale = self.scale();
        let relabel = |c: &CandidateLadder| CandidateLadder::new(c.label.clone(), &self.ladder, c.values.clone(), scale);
        let zero = relabel(&self.zero);
        let cands: Vec<CandidateLadder> = self.candidates.iter().map(relabel).collect();
        verdict_of(&zero, &cands)
    }

    fn scale(&self) -> f64 {
        self.zero.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| HardyError::Numerical(e.to_string()))
    }

    /// One row per level: `beta`, `mass`, then one column per candidate.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let err = |e: csv::Error| HardyError::Numerical(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["beta".to_string(), "mass".to_string()];
        header.extend(self.candidates.iter().map(|c| c.label.clone()));
        w.write_record(&header).map_err(err)?;
        for (j, b) in self.ladder.iter().enumerate() {
            let mut row = vec![format!("{b:e}"), format!("{:e}", self.zero.values[j])];
            row.extend(self.candidates.iter().map(|c| format!("{:e}", c.values[j])));
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| HardyError::Numerical(e.to_string()))
    }
}

fn check_levels(grid: &Grid, levels: usize) -> Result<Vec<f64>> {
    if levels < 5 {
        return Err(HardyError::Parameter(format!("trace ladder needs at least 5 levels, got {levels}")));
    }
    let l = ladder(grid.domain().beta0, levels);
    for &b in &l {
        grid.check_level(b)?;
    }
    Ok(l)
}

/// Classifies the normalized trace of `u` against `candidates` and `ν = 0`.
pub fn classify_trace(
    kernels: &Kernels,
    u: &Field,
    candidates: &[(String, BoundaryMeasure)],
    levels: usize,
) -> Result<TraceReport> {
    let grid = kernels.grid();
    grid.check_field(u)?;
    let ladder = check_levels(grid, levels)?;
    let am = kernels.exponents().alpha_minus;
    let masses = ladder
        .iter()
        .map(|&b| deviation(u, &Field::zeros(grid), am, b))
        .collect::<Result<Vec<_>>>()?;
    let scale = masses.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero = CandidateLadder::new("zero".into(), &ladder, masses, scale);
    let mut cands = Vec::with_capacity(candidates.len());
    for (label, nu) in candidates {
        let k = kernels.martin_integral(nu)?;
        let values = ladder
            .iter()
            .map(|&b| deviation(u, &k, am, b))
            .collect::<Result<Vec<_>>>()?;
        cands.push(CandidateLadder::new(label.clone(), &ladder, values, scale));
    }
    let (verdict, matched) = verdict_of(&zero, &cands);
    Ok(TraceReport {
        alpha_minus: am,
        ladder,
        zero,
        candidates: cands,
        verdict,
        matched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(values: Vec<f64>, l: &[f64]) -> CandidateLadder {
        CandidateLadder::new("c".into(), l, values, 1.0)
    }

    #[test]
    fn ladder_is_strictly_decreasing_inside_collar() {
        let l = ladder(0.5, 6);
        assert_eq!(l.len(), 6);
        assert_eq!(l[0], 0.25);
        assert!(l.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn statuses_from_synthetic_ladders() {
        let l = ladder(0.5, 11);
        let decay: Vec<f64> = l.iter().map(|b| b.sqrt()).collect();
        assert_eq!(ladder_status(&l, &decay, 1.0), LadderStatus::Decays);
        let flat = vec![3.0; 11];
        assert_eq!(ladder_status(&l, &flat, 1.0), LadderStatus::BoundedBelow);
        assert_eq!(ladder_status(&l, &[0.0; 11], 1.0), LadderStatus::Exact);
        let short = ladder(0.5, 6);
        let slow: Vec<f64> = short.iter().map(|b| b.sqrt()).collect();
        assert_eq!(ladder_status(&short, &slow, 1.0), LadderStatus::Undecided);
    }

    #[test]
    fn depth_follows_exponent_gap() {
        assert_eq!(classify_levels(0.75, 0.25), CLASSIFY_LEVELS);
        let d = classify_levels(0.6, 0.4);
        assert!(0.5f64.powf(0.2 * (d - 1) as f64) <= RESIDUAL_FACTOR);
        assert_eq!(classify_levels(0.5, 0.5), MAX_LEVELS);
    }

    #[test]
    fn verdict_rules() {
        let l = ladder(0.5, 11);
        let flat = cl(vec![2.0; 11], &l);
        let zero = cl(vec![0.0; 11], &l);
        let decay = cl(l.iter().map(|b| b.sqrt()).collect(), &l);
        assert_eq!(verdict_of(&flat, &[flat.clone(), zero.clone()]), (Verdict::TraceEqualsCandidate, Some(1)));
        assert_eq!(verdict_of(&decay, &[flat.clone()]), (Verdict::TraceZero, None));
        assert_eq!(verdict_of(&flat, &[flat.clone()]), (Verdict::NoDecay, None));
        assert_eq!(verdict_of(&flat, &[zero.clone(), decay]).0, Verdict::Inconclusive);
    }
}
