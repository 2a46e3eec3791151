use std::f64::consts::PI;

use hardy_core::kernels::Kernels;
use hardy_core::regularizing::{standard_families, verify_regularizing_estimates};
use hardy_core::weaklp::*;
use hardy_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `sup_ω ∫_ω |f| dτ / τ(ω)^{1/p'}` over every nonempty subset, each summed in
/// the order of decreasing `|f|` (ties by index).
fn brute_force(f: &[f64], w: &[f64], p: f64) -> f64 {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[b].abs().partial_cmp(&f[a].abs()).unwrap());
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

#[test]
fn prefix_scan_equals_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..200 {
        let n = 1 + trial % 12;
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..2.0)).collect();
        let p = rng.random_range(1.05..6.0);
        assert_eq!(weak_norm(&f, &w, p), brute_force(&f, &w, p), "trial {trial}");
    }
}

#[test]
fn norm_quasinorm_equivalence_on_random_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let n = rng.random_range(5..400);
        let levels: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..10.0)).collect();
        let f: Vec<f64> = (0..n).map(|_| levels[rng.random_range(0..6)]).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let p = rng.random_range(1.1..5.0);
        let star = weak_quasinorm(&f, &w, p);
        let norm = weak_norm(&f, &w, p);
        // Single-level fields give equality on the left; allow its rounding only.
        assert!(star <= norm * (1.0 + 8.0 * f64::EPSILON), "{star} > {norm}");
        assert!(norm <= p / (p - 1.0) * star, "{norm} > p'·{star}");
    }
}

#[test]
fn distribution_function_is_nonincreasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f: Vec<f64> = (0..300).map(|_| rng.random_range(-5.0..5.0)).collect();
    let w: Vec<f64> = (0..300).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        let l = distribution_function(&f, &w, 0.1 * k as f64);
        assert!(l <= prev);
        prev = l;
    }
}

#[test]
fn power_singularity_on_the_disk() {
    // f = min(|x|^{-2/p}, A): λ(a) = π a^{-p} for 1 ≤ a < A, so ‖f‖* = π^{1/p}.
    // The cap keeps level sets many cells wide; a level set made of whole cells
    // overshoots the disk it approximates by (1 + h/2r)².
    let g = Grid::new(DomainSpec::disk(1.0), GridOptions::uniform(96)).unwrap();
    let p = 3.0;
    let cap = 2.0;
    let f = Field::from_fn(&g, |x, _| (x[0].hypot(x[1])).powf(-2.0 / p).min(cap));
    let w = g.volumes();
    for a in [1.2, 1.5, 1.9] {
        let l = distribution_function(f.values(), w, a);
        let exact = PI * a.powf(-p);
        assert!((l - exact).abs() < 0.05 * exact, "a = {a}: {l} vs {exact}");
    }
    let q = weak_quasinorm(f.values(), w, p);
    assert!((q - PI.powf(1.0 / p)).abs() < 0.02 * PI.powf(1.0 / p), "{q}");
}

#[test]
fn regularizing_ratios_have_bounded_spread() {
    let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(64)).unwrap();
    let k = Kernels::new(&g, 0.1875).unwrap();
    let (taus, nus) = standard_families(&g);
    let r = verify_regularizing_estimates(&k, &taus, &nus, 0.0).unwrap();
    assert_eq!(r.skipped, vec!["green_total"]);
    assert_eq!(r.pairs.len(), 2);
    for p in &r.pairs {
        assert!(p.max_ratio.is_finite() && p.spread <= 5.0, "{p:?}");
    }
}

#[test]
fn regularizing_ratios_at_mu_zero() {
    let g = Grid::new(DomainSpec::disk(1.0), GridOptions::graded(48)).unwrap();
    let k = Kernels::new(&g, 0.0).unwrap();
    let (taus, nus) = standard_families(&g);
    let r = verify_regularizing_estimates(&k, &taus, &nus, 0.5).unwrap();
    let martin = r.pairs.iter().find(|p| p.pair.label == "martin").unwrap();
    assert!((martin.pair.p - 2.5).abs() < 1e-15);
    assert!(r.max_spread() <= 5.0, "{r:?}");
}
