use std::sync::Arc;

use hardy_core::kernels::Kernels;
use hardy_core::linear::*;
use hardy_core::trace::Verdict;
use hardy_core::*;

const MU: f64 = 0.1875;
const Y: Point = [1.0, 0.0];

fn setup(res: usize) -> (Arc<Grid>, Kernels) {
    let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(res)).unwrap();
    let k = Kernels::new(&g, MU).unwrap();
    (g, k)
}

fn node_near(g: &Grid, p: Point) -> Point {
    g.coords()[g.nearest_node(p).0]
}

#[test]
fn standard_test_functions_are_admissible() {
    let (_, k) = setup(64);
    let tf = make_test_functions(&k).unwrap();
    let kinds: Vec<TestFunctionKind> = tf.iter().map(|t| t.kind).collect();
    assert_eq!(
        kinds,
        vec![
            TestFunctionKind::GreensPotentialOfBounded,
            TestFunctionKind::Eigenfunction,
            TestFunctionKind::RegularizedPower
        ]
    );
    for t in &tf {
        let c = t.certificate;
        assert!(c.value.is_finite() && c.operator.is_finite() && c.gradient.is_finite(), "{c:?}");
    }
    // -L_μ 𝔾[1] = 1.
    assert!((tf[0].certificate.operator - 1.0).abs() < 1e-8);
}

#[test]
fn weak_formulation_holds_for_every_test_function() {
    let (g, k) = setup(64);
    let tf = make_test_functions(&k).unwrap();
    let tau = InteriorMeasure::dirac(node_near(&g, [0.2, -0.3]), 1.5);
    let nu = BoundaryMeasure::dirac(Y, 1.0).plus(&BoundaryMeasure::dirac([0.0, -1.0], 0.5)).unwrap();
    let sol = solve_linear(&k, &tau, &nu).unwrap();
    for z in &tf {
        let r = weak_residual(&k, &sol.u, &tau, &nu, z).unwrap();
        assert!(r.relative <= 1e-3, "{:?}: {r:?}", z.kind);
    }
}

#[test]
fn perturbed_solution_violates_the_identity() {
    let (g, k) = setup(64);
    let tf = make_test_functions(&k).unwrap();
    let tau = InteriorMeasure::dirac(node_near(&g, [0.0, 0.4]), 1.0);
    let nu = BoundaryMeasure::dirac(Y, 1.0);
    let sol = solve_linear(&k, &tau, &nu).unwrap();
    let bump = k.martin_integral(&BoundaryMeasure::dirac([-1.0, 0.0], 1.0)).unwrap();
    let u = sol.u.add(&bump).unwrap();
    for z in &tf {
        let r = weak_residual(&k, &u, &tau, &nu, z).unwrap();
        assert!(r.relative > 0.05, "{:?}: {r:?}", z.kind);
    }
}

#[test]
fn zero_data_zero_residual() {
    let (g, k) = setup(32);
    let tf = make_test_functions(&k).unwrap();
    let u = Field::zeros(&g);
    for z in &tf {
        let r = weak_residual(&k, &u, &InteriorMeasure::default(), &BoundaryMeasure::zero(), z).unwrap();
        assert_eq!(r.absolute, 0.0);
        assert_eq!(r.relative, 0.0);
    }
}

#[test]
fn green_integration_identity() {
    let (g, k) = setup(64);
    let tf = make_test_functions(&k).unwrap();
    let tau = InteriorMeasure::uniform(&g, 2.0);
    let green = k.greens_potential(&tau).unwrap();
    let masses = tau.node_masses(&g).unwrap();
    for z in &tf {
        let lhs: f64 = green
            .values()
            .iter()
            .zip(z.minus_l.values())
            .zip(g.volumes())
            .map(|((a, b), v)| a * b * v)
            .sum();
        let rhs: f64 = masses.iter().zip(z.field.values()).map(|(m, f)| m * f).sum();
        assert!((lhs - rhs).abs() <= 1e-3 * rhs.abs(), "{:?}: {lhs} {rhs}", z.kind);
    }
}

#[test]
fn traces_of_representations() {
    let (g, k) = setup(64);
    let nu = BoundaryMeasure::dirac(Y, 1.0);
    let pure = solve_linear(&k, &InteriorMeasure::default(), &nu).unwrap();
    assert_eq!(pure.trace.verdict, Verdict::TraceEqualsCandidate);
    let center = g.coords()[g.center_node()];
    let green = solve_linear(&k, &InteriorMeasure::dirac(center, 1.0), &BoundaryMeasure::zero()).unwrap();
    assert_eq!(green.trace.verdict, Verdict::TraceZero);
    let mixed = solve_linear(&k, &InteriorMeasure::dirac(center, 1.0), &nu).unwrap();
    assert_eq!(mixed.trace.verdict, Verdict::TraceEqualsCandidate);
}

#[test]
fn additive_and_positive() {
    let (g, k) = setup(48);
    let t1 = InteriorMeasure::dirac(node_near(&g, [0.1, 0.1]), 1.0);
    let t2 = InteriorMeasure::uniform(&g, 0.5);
    let n1 = BoundaryMeasure::dirac(Y, 1.0);
    let n2 = BoundaryMeasure::from_density(BoundaryDensity::uniform(0.3));
    let a = solve_linear(&k, &t1, &n1).unwrap().u;
    let b = solve_linear(&k, &t2, &n2).unwrap().u;
    let both = InteriorMeasure {
        atoms: t1.atoms.clone(),
        density: t2.density.clone(),
    };
    let c = solve_linear(&k, &both, &n1.plus(&n2).unwrap()).unwrap().u;
    let sum = a.add(&b).unwrap();
    let scale = c.max_abs();
    for (x, y) in sum.values().iter().zip(c.values()) {
        assert!((x - y).abs() <= 1e-10 * scale);
    }
    for f in [&a, &b, &c] {
        assert!(f.min_value() >= 0.0);
    }
}

#[test]
fn norm_certificate_is_stable_across_data() {
    let (g, k) = setup(64);
    let center = g.coords()[g.center_node()];
    let cases = [
        (InteriorMeasure::dirac(center, 1.0), BoundaryMeasure::zero()),
        (InteriorMeasure::uniform(&g, 1.0), BoundaryMeasure::zero()),
        (InteriorMeasure::default(), BoundaryMeasure::dirac(Y, 1.0)),
        (
            InteriorMeasure::dirac(node_near(&g, [0.0, 0.7]), 3.0),
            BoundaryMeasure::from_density(BoundaryDensity::uniform(1.0)),
        ),
    ];
    let ratios: Vec<f64> = cases
        .iter()
        .map(|(t, n)| solve_linear(&k, t, n).unwrap().norm.ratio)
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    assert!(lo > 0.0 && hi / lo <= 10.0, "{ratios:?}");
}

#[test]
fn mollified_diracs_converge_monotonically() {
    let (g, k) = setup(64);
    let am = k.exponents().alpha_minus;
    let target = k.martin_integral(&BoundaryMeasure::dirac(Y, 1.0)).unwrap();
    let gaps: Vec<f64> = [1.0, 0.5, 0.25, 0.125]
        .iter()
        .map(|&w| {
            let nu = BoundaryMeasure::mollified_dirac(g.domain(), 0.0, w, 1.0, 16);
            weighted_l1(&k.martin_integral(&nu).unwrap().sub(&target).unwrap(), -am)
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}
