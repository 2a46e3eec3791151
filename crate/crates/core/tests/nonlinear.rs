use std::sync::Arc;

use hardy_core::kernels::Kernels;
use hardy_core::linear::make_test_functions;
use hardy_core::nonlinear::*;
use hardy_core::*;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MU: f64 = 0.1875;
const Y: Point = [1.0, 0.0];

fn setup(res: usize, mu: f64) -> (Arc<Grid>, Kernels) {
    let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(res)).unwrap();
    let k = Kernels::new(&g, mu).unwrap();
    (g, k)
}

fn dirac(k: f64) -> BoundaryMeasure {
    BoundaryMeasure::dirac(Y, k)
}

/// Newton on the assembled system with a dense LU per step.
fn dense_newton(k: &Kernels, q: f64, fixed: &[bool], h: &[f64]) -> Vec<f64> {
    let a = k.operator().matrix().to_dense();
    let vol = k.grid().volumes();
    let n = h.len();
    let mut u = h.to_vec();
    for _ in 0..100 {
        let au = &a * DVector::from_column_slice(&u);
        let mut jac = a.clone();
        let mut f = DVector::zeros(n);
        for i in 0..n {
            if fixed[i] {
                jac.row_mut(i).fill(0.0);
                jac[(i, i)] = 1.0;
                f[i] = u[i] - h[i];
            } else {
                let p = u[i].max(0.0);
                f[i] = au[i] + vol[i] * p.powf(q);
                jac[(i, i)] += vol[i] * q * p.powf(q - 1.0);
            }
        }
        let s = jac.lu().solve(&f).unwrap();
        u.iter_mut().zip(s.iter()).for_each(|(x, d)| *x -= d);
        if s.amax() <= 1e-14 * u.iter().fold(0.0f64, |m, x| m.max(x.abs())) {
            break;
        }
    }
    u
}

#[test]
fn zero_exterior_data_gives_zero() {
    let (g, k) = setup(32, MU);
    let s = inner_monotone_solve(&k, 2.0, 0.125, &Field::zeros(&g), &SolveOptions::default()).unwrap();
    assert!(s.u.iter().all(|v| *v == 0.0));
}

#[test]
fn monotone_inner_scheme_matches_dense_newton() {
    let (g, k) = setup(16, 0.0);
    let beta = 0.125;
    let h = Field::constant(&g, 1.0);
    let s = inner_monotone_solve(&k, 2.0, beta, &h, &SolveOptions::default()).unwrap();
    let fixed = exhaustion_mask(&g, beta);
    let oracle = dense_newton(&k, 2.0, &fixed, h.values());
    let err = s.u.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
    assert!(s.iterations <= 3, "{s:?}");
    // Strict absorption pulls the interior below the boundary value.
    assert!(s.u.iter().zip(&fixed).all(|(v, f)| *f || (*v > 0.0 && *v < 1.0)));
}

#[test]
fn inner_sequence_is_nonincreasing_with_hardy_term() {
    let (g, k) = setup(32, MU);
    let nu = dirac(1.0);
    let h = k.martin_integral(&nu).unwrap();
    let opts = SolveOptions::default();
    let s = inner_monotone_solve(&k, 2.0, g.domain().beta0 / 16.0, &h, &opts).unwrap();
    assert!(s.violation <= 1e-10, "{s:?}");
    assert!(s.iterations > 1);
    assert!(inner_monotone_solve(&k, 2.0, 0.7, &h, &opts).is_err());
    assert!(inner_monotone_solve(&k, 2.0, 0.1, &h.scale(-1.0), &opts).is_err());
}

#[test]
fn monotone_and_newton_schemes_agree() {
    let (_, k) = setup(32, MU);
    let newton = SolveOptions {
        levels: 6,
        picard: false,
        ..Default::default()
    };
    let monotone = SolveOptions {
        scheme: InnerScheme::Monotone,
        ..newton.clone()
    };
    let a = solve_for(&k, 2.0, dirac(1.0), &newton).unwrap();
    let b = solve_for(&k, 2.0, dirac(1.0), &monotone).unwrap();
    assert!(b.report.inner_violation <= 1e-10);
    let gap = a.u.sub(&b.u).unwrap().max_abs() / a.u.max_abs();
    assert!(gap <= 1e-7, "{gap}");
}

#[test]
fn subcritical_dirac_solution_satisfies_the_identity() {
    let (_, k) = setup(64, MU);
    let s = solve_for(&k, 2.0, dirac(1.0), &SolveOptions::default()).unwrap();
    let r = &s.report;
    assert!(r.subcritical);
    assert!(r.identity_residual <= 1e-3, "{}", r.identity_residual);
    assert!(r.outer_violation <= 1e-10);
    assert!(r.domination_violation <= 1e-10);
    let p = r.picard.as_ref().unwrap();
    assert!(p.converged && !p.clamped, "{p:?}");
    assert!(p.agreement <= 1e-3, "{}", p.agreement);
    assert!(p.bracket_violation <= 1e-10);
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    // Antitone Picard from 0 reaches the same limit.
    let (from_zero, rep) = picard(&k, &s.martin, 2.0, &Field::zeros(k.grid()), &SolveOptions::default()).unwrap();
    assert!(rep.converged);
    let gap = from_zero.sub(s.picard.as_ref().unwrap()).unwrap().max_abs() / from_zero.max_abs();
    assert!(gap <= 1e-6, "{gap}");
}

#[test]
fn bounded_density_data() {
    let (g, k) = setup(48, MU);
    let nu = BoundaryMeasure::from_density(BoundaryDensity::uniform(1.0 / (2.0 * std::f64::consts::PI)));
    let s = solve_for(&k, 2.0, nu, &SolveOptions::default()).unwrap();
    assert!(s.report.identity_residual <= 1e-3);
    assert!(s.report.picard.as_ref().unwrap().agreement <= 1e-3);
    assert!(s.u.min_value() >= 0.0);
    assert!(order_violation(&s.u, &s.martin).unwrap() <= 1e-10);
    let _ = g;
}

#[test]
fn zero_data_gives_zero_solution() {
    let (_, k) = setup(32, MU);
    let s = solve_for(&k, 2.0, BoundaryMeasure::zero(), &SolveOptions::default()).unwrap();
    assert_eq!(s.u.max_abs(), 0.0);
    assert_eq!(s.report.identity_residual, 0.0);
}

#[test]
fn invalid_problems_are_rejected() {
    let (_, k) = setup(16, MU);
    assert!(NonlinearProblem::new(&k, 1.0, dirac(1.0)).is_err());
    assert!(NonlinearProblem::new(&k, f64::INFINITY, dirac(1.0)).is_err());
    assert!(NonlinearProblem::new(&k, 2.0, dirac(-1.0)).is_err());
}

#[test]
fn weak_form_residuals() {
    let (g, k) = setup(48, MU);
    let tf = make_test_functions(&k).unwrap();
    let s = solve_for(&k, 2.0, dirac(1.0), &SolveOptions::default()).unwrap();
    for z in &tf {
        let r = verify_weak_form(&k, &s.u, &s.martin, 2.0, z).unwrap();
        assert!(r.relative <= 1e-3, "{:?}: {r:?}", z.kind);
        // With u = 𝕂[ν] the defect is exactly ∫𝕂^q ζ.
        let r = verify_weak_form(&k, &s.martin, &s.martin, 2.0, z).unwrap();
        let expected: f64 = (0..g.len())
            .map(|i| g.volumes()[i] * s.martin.values()[i].powi(2) * z.field.values()[i])
            .sum();
        assert!((r.absolute - expected).abs() <= 1e-8 * expected, "{r:?} {expected}");
        let zero = Field::zeros(&g);
        let r = verify_weak_form(&k, &zero, &zero, 2.0, z).unwrap();
        assert_eq!((r.absolute, r.relative), (0.0, 0.0));
    }
}

#[test]
fn dirac_profile_approaches_the_martin_kernel() {
    let (_, k) = setup(64, MU);
    let (p, _) = dirac_profile(&k, 2.0, 1.0, Y, 10, &SolveOptions::default()).unwrap();
    assert!(p.increasing, "{:?}", p.ratios);
    assert!((0.9..=1.0).contains(&p.finest_ratio), "{}", p.finest_ratio);
    assert!(p.bound_exponent > 0.0);
    assert!(dirac_profile(&k, 4.0, 1.0, Y, 10, &SolveOptions::default()).is_err());
}

#[test]
fn monotone_in_the_data() {
    let (g, k) = setup(32, MU);
    let opts = SolveOptions {
        levels: 12,
        picard: false,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rays = g.rays();
    for _ in 0..4 {
        let mut small = BoundaryMeasure::zero();
        let mut extra = BoundaryMeasure::zero();
        for _ in 0..3 {
            let y = rays[rng.random_range(0..rays.len())].boundary;
            small = small.plus(&BoundaryMeasure::dirac(y, rng.random_range(0.1..2.0))).unwrap();
            let z = rays[rng.random_range(0..rays.len())].boundary;
            extra = extra.plus(&BoundaryMeasure::dirac(z, rng.random_range(0.0..1.0))).unwrap();
        }
        let c = rng.random_range(0.0..0.5);
        let large = small
            .plus(&extra)
            .unwrap()
            .plus(&BoundaryMeasure::from_density(BoundaryDensity::uniform(c)))
            .unwrap();
        let a = solve_for(&k, 2.0, small, &opts).unwrap().u;
        let b = solve_for(&k, 2.0, large, &opts).unwrap().u;
        assert!(order_violation(&a, &b).unwrap() <= 1e-10);
    }
    let by_mass: Vec<Field> = [0.5, 1.0, 4.0]
        .iter()
        .map(|&m| solve_for(&k, 2.0, dirac(m), &opts).unwrap().u)
        .collect();
    for w in by_mass.windows(2) {
        assert!(order_violation(&w[0], &w[1]).unwrap() <= 1e-10);
    }
}

#[test]
fn cone_integral_diverges_only_above_the_critical_exponent() {
    let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(64).with_lateral(128)).unwrap();
    let k = Kernels::new(&g, MU).unwrap();
    let opts = SolveOptions::default();
    let sup = supercritical_probe(&k, 4.0, Y, 0.5, 8, None, 6, &opts).unwrap();
    assert!(sup.exponent < 0.0);
    assert!(sup.growth.len() >= 2, "{sup:?}");
    assert!(sup.growth.iter().all(|&f| f >= 1.5), "{:?}", sup.growth);
    let sub = supercritical_probe(&k, 2.0, Y, 0.5, 8, None, 6, &opts).unwrap();
    assert!(sub.exponent > 0.0);
    assert!(sub.growth.windows(2).all(|w| w[1] < w[0]), "{:?}", sub.growth);
    assert!(*sub.growth.last().unwrap() <= 1.25, "{:?}", sub.growth);
    assert!(cone_integrals(&k, 2.0, Y, 1.5, 0.5, 4, 0.0).is_err());
}

#[test]
fn interior_values_saturate_in_k() {
    let (g, k) = setup(48, MU);
    let opts = SolveOptions {
        picard: false,
        ..Default::default()
    };
    let r = 0.25;
    let q2 = keller_osserman_probe(&k, 2.0, Y, 1.0, 12, r, &opts).unwrap();
    assert!(q2.increasing, "{:?}", q2.maxima);
    assert!(q2.last_increment <= 0.05, "{:?}", q2.increments);
    let q3 = keller_osserman_probe(&k, 3.0, Y, 1.0, 4, r, &opts).unwrap();
    assert!(q3.maxima.iter().zip(&q2.maxima).all(|(a, b)| a < b));
    let center = g.domain().center();
    assert_eq!(ball_max(&Field::constant(&g, 2.0), center, r), 2.0);
}

#[test]
fn mollified_diracs_give_converging_solutions() {
    let (_, k) = setup(64, MU);
    let opts = SolveOptions {
        picard: false,
        ..Default::default()
    };
    let s = stability_ladder(&k, 2.0, 0.0, 1.0, &[0.5, 0.25, 0.125], 16, &opts).unwrap();
    assert!(s.decreasing, "{s:?}");
    assert!(s.final_gap <= 0.15, "{s:?}");
}

#[test]
fn apriori_ratio_is_stable_over_two_decades() {
    let (_, k) = setup(48, MU);
    let opts = SolveOptions {
        picard: false,
        ..Default::default()
    };
    let a = apriori_scan(&k, 2.0, &dirac(1.0), &[0.01, 0.1, 1.0], &opts).unwrap();
    assert!(a.spread <= 2.0, "{a:?}");
}
