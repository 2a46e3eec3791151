//! The linear problem `-L_μ u = τ`, `tr*(u) = ν`, solved by the representation
//! `u = 𝔾[τ] + 𝕂[ν]`, and its weak formulation
//!
//! ```text
//! -∫ u L_μζ dx = ∫ ζ dτ - ∫ 𝕂[ν] L_μζ dx
//! ```
//!
//! tested against functions `ζ` with `δ^{-α+}ζ`, `δ^{α-}L_μζ` and
//! `δ^{α-}|∇ζ|` bounded.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::geometry::{Field, Grid, GridOptions};
use crate::kernels::Kernels;
use crate::measures::{BoundaryMeasure, InteriorMeasure};
use crate::spectral::principal_eigenpair_of;
use crate::trace::{classify_levels, classify_trace, TraceReport};

/// A certified bound may grow by at most this factor between the companion
/// grid and the working grid.
pub const ADMISSIBLE_GROWTH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunctionKind {
    /// `𝔾[1]`.
    GreensPotentialOfBounded,
    /// `φ_{μ,1}`.
    Eigenfunction,
    /// `δ̃^{α+}`.
    RegularizedPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    /// `sup |δ^{-α+} ζ|`.
    pub value: f64,
    /// `sup |δ^{α-} L_μ ζ|`.
    pub operator: f64,
    /// `sup δ^{α-} |∇ζ|`.
    pub gradient: f64,
}

impl Certificate {
    fn max_growth(&self, coarse: &Certificate) -> f64 {
        [
            self.value / coarse.value,
            self.operator / coarse.operator,
            self.gradient / coarse.gradient,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct TestFunction {
    pub kind: TestFunctionKind,
    pub field: Field,
    /// `-L_μ ζ` at the nodes.
    pub minus_l: Field,
    pub certificate: Certificate,
}

/// `δ̃`: equal to `δ` up to `β₀/2`, a cubic Hermite blend up to `β₀`, and the
/// constant `3β₀/4` beyond.
pub fn regularized_delta(delta: f64, beta0: f64) -> f64 {
    let a = beta0 / 2.0;
    if delta <= a {
        return delta;
    }
    if delta >= beta0 {
        return 0.75 * beta0;
    }
    // Hermite data: (a, a, slope 1) to (β₀, 3β₀/4, slope 0).
    let h = beta0 - a;
    let t = (delta - a) / h;
    let (y0, y1, m0) = (a, 0.75 * beta0, h);
    let h00 = 2.0 * t * t * t - 3.0 * t * t + 1.0;
    let h10 = t * t * t - 2.0 * t * t + t;
    let h01 = -2.0 * t * t * t + 3.0 * t * t;
    h00 * y0 + h10 * m0 + h01 * y1
}

fn certify(kernels: &Kernels, zeta: &Field, minus_l: &Field) -> Certificate {
    let grid = kernels.grid();
    let e = kernels.exponents();
    let d = grid.deltas();
    let grad = grid.gradient_magnitude(zeta.values());
    let sup = |f: &dyn Fn(usize) -> f64| (0..grid.len()).map(f).fold(0.0, f64::max);
    Certificate {
        value: sup(&|i| (zeta.values()[i] * d[i].powf(-e.alpha_plus)).abs()),
        operator: sup(&|i| (minus_l.values()[i] * d[i].powf(e.alpha_minus)).abs()),
        gradient: sup(&|i| grad[i] * d[i].powf(e.alpha_minus)),
    }
}

fn build(kernels: &Kernels) -> Result<Vec<TestFunction>> {
    let grid = kernels.grid();
    let op = kernels.operator();
    let ap = kernels.exponents().alpha_plus;
    let beta0 = grid.domain().beta0;
    let green = kernels.greens_potential(&InteriorMeasure::uniform(grid, 1.0))?;
    let phi = principal_eigenpair_of(op)?.phi;
    let power = Field::from_fn(grid, |_, d| regularized_delta(d, beta0).powf(ap));
    let mut out = Vec::new();
    for (kind, field) in [
        (TestFunctionKind::GreensPotentialOfBounded, green),
        (TestFunctionKind::Eigenfunction, phi),
        (TestFunctionKind::RegularizedPower, power),
    ] {
        let minus_l = op.apply(&field)?;
        let certificate = certify(kernels, &field, &minus_l);
        out.push(TestFunction {
            kind,
            field,
            minus_l,
            certificate,
        });
    }
    Ok(out)
}

/// The three standard test functions with their bounds, checked against a
/// companion grid at three quarters of the resolution: a bound growing by more
/// than [`ADMISSIBLE_GROWTH`] is taken as unbounded.
pub fn make_test_functions(kernels: &Kernels) -> Result<Vec<TestFunction>> {
    let fine = build(kernels)?;
    let opts = kernels.grid().options().clone();
    let companion = GridOptions {
        resolution: (opts.resolution * 3 / 4).max(8),
        lateral: opts.lateral.map(|l| (l * 3 / 4).max(8)),
        ..opts
    };
    let cgrid = Grid::new(kernels.grid().domain().clone(), companion)?;
    let ckernels = Kernels::from_operator(crate::operator::DiscreteOperator::assemble_with(
        &cgrid,
        kernels.mu(),
        0.0,
        kernels.operator().hardy_term(),
    )?)?;
    let coarse = build(&ckernels)?;
    for (f, c) in fine.iter().zip(&coarse) {
        let growth = f.certificate.max_growth(&c.certificate);
        let finite = [f.certificate.value, f.certificate.operator, f.certificate.gradient]
            .iter()
            .all(|v| v.is_finite());
        if !finite || growth > ADMISSIBLE_GROWTH {
            return Err(HardyError::Admissibility {
                tag: format!("{:?}", f.kind),
                reason: format!("bounds {:?} grew by {growth:.3} from {:?}", f.certificate, c.certificate),
            });
        }
    }
    Ok(fine)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormCertificate {
    /// `‖u‖_{L¹_{δ^{-α-}}}`.
    pub solution: f64,
    /// `∫δ^{α+} dτ + ‖ν‖`.
    pub data: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub u: Field,
    pub green: Field,
    pub martin: Field,
    pub trace: TraceReport,
    pub norm: NormCertificate,
}

/// `∫ |u| δ^a dx`.
pub fn weighted_l1(u: &Field, a: f64) -> f64 {
    let g = u.grid();
    u.values()
        .iter()
        .zip(g.volumes())
        .zip(g.deltas())
        .map(|((f, v), d)| f.abs() * v * d.powf(a))
        .sum()
}

/// `u = 𝔾[τ] + 𝕂[ν]` with its trace classification and norm certificate.
pub fn solve_linear(kernels: &Kernels, tau: &InteriorMeasure, nu: &BoundaryMeasure) -> Result<LinearSolution> {
    let grid = kernels.grid();
    let e = *kernels.exponents();
    let green = kernels.greens_potential(tau)?;
    let martin = kernels.martin_integral(nu)?;
    let u = green.add(&martin)?;
    let candidates = if nu.is_zero() {
        Vec::new()
    } else {
        vec![("nu".to_string(), nu.clone())]
    };
    let trace = classify_trace(kernels, &u, &candidates, classify_levels(e.alpha_plus, e.alpha_minus))?;
    let solution = weighted_l1(&u, -e.alpha_minus);
    let data = tau.weighted_mass(grid, e.alpha_plus)? + nu.total_variation(grid.domain());
    Ok(LinearSolution {
        norm: NormCertificate {
            solution,
            data,
            ratio: if data > 0.0 { solution / data } else { 0.0 },
        },
        u,
        green,
        martin,
        trace,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeakResidual {
    /// `-∫ u L_μζ`.
    pub lhs: f64,
    /// `∫ζ dτ - ∫ 𝕂[ν] L_μζ`.
    pub rhs: f64,
    pub absolute: f64,
    /// `absolute / max(|lhs|, |rhs|)`, zero when both sides vanish.
    pub relative: f64,
}

fn integral_against(a: &Field, minus_l: &Field, grid: &Arc<Grid>) -> f64 {
    a.values()
        .iter()
        .zip(minus_l.values())
        .zip(grid.volumes())
        .map(|((x, y), v)| x * y * v)
        .sum()
}

/// Residual of the weak formulation for `u` against one test function.
pub fn weak_residual(
    kernels: &Kernels,
    u: &Field,
    tau: &InteriorMeasure,
    nu: &BoundaryMeasure,
    zeta: &TestFunction,
) -> Result<WeakResidual> {
    let grid = kernels.grid();
    grid.check_field(u)?;
    grid.check_field(&zeta.field)?;
    let lhs = integral_against(u, &zeta.minus_l, grid);
    let masses = tau.node_masses(grid)?;
    let tau_part: f64 = masses.iter().zip(zeta.field.values()).map(|(m, z)| m * z).sum();
    let martin_part = if nu.is_zero() {
        0.0
    } else {
        integral_against(&kernels.martin_integral(nu)?, &zeta.minus_l, grid)
    };
    let rhs = tau_part + martin_part;
    let absolute = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs());
    Ok(WeakResidual {
        lhs,
        rhs,
        absolute,
        relative: if scale > 0.0 { absolute / scale } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blend_is_c1_and_capped() {
        let b = 0.5;
        assert_eq!(regularized_delta(0.1, b), 0.1);
        assert_eq!(regularized_delta(0.9, b), 0.375);
        let h = 1e-7;
        for x in [0.25, 0.5] {
            let left = (regularized_delta(x, b) - regularized_delta(x - h, b)) / h;
            let right = (regularized_delta(x + h, b) - regularized_delta(x, b)) / h;
            assert!((left - right).abs() < 1e-5, "{x}: {left} {right}");
            assert!((regularized_delta(x + h, b) - regularized_delta(x - h, b)).abs() < 3.0 * h);
        }
        let mut prev = 0.0;
        for k in 0..100 {
            let v = regularized_delta(k as f64 * 0.01, b);
            assert!(v >= prev);
            prev = v;
        }
    }
}
