//! Weak `L^p` (Marcinkiewicz) quantities of node-sampled functions against a
//! discrete measure given by node masses `w`.
//!
//! With masses `w_i ≥ 0` and values `|f_i|`, the distribution function is
//! `λ(a) = Σ_{|f_i| > a} w_i`, the quasinorm is `(sup_a a^p λ(a))^{1/p}` and the
//! norm is `sup_ω ∫_ω |f| dτ / τ(ω)^{1/p'}`.
//!
//! Both suprema are attained on super-level sets. For the quasinorm this is
//! immediate (`a^p λ(a)` increases on every interval where `λ` is constant).
//! For the norm, relax `ω` to weights `0 ≤ χ ≤ 1`: at fixed mass `m` the best
//! `χ` is the greedy fill by decreasing `|f|`, so the relaxed objective is
//! `F(m)/m^{1/p'}` with `F` piecewise linear. On each linear piece the
//! derivative of that ratio changes sign at most once, from negative to
//! positive, so the maximum sits at a breakpoint, which is a genuine prefix of
//! the sorted order.

use crate::scalar::Scalar;

fn sorted_desc<T: Scalar>(f: &[T], w: &[T]) -> Vec<(T, T)> {
    assert_eq!(f.len(), w.len(), "values and masses differ in length");
    let mut v: Vec<(T, T)> = f
        .iter()
        .zip(w)
        .filter(|(_, &m)| m > T::zero())
        .map(|(&x, &m)| (x.abs(), m))
        .collect();
    v.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// `λ_f(a; τ) = τ({|f| > a})`.
pub fn distribution_function<T: Scalar>(f: &[T], w: &[T], a: T) -> T {
    f.iter()
        .zip(w)
        .filter(|(x, _)| x.abs() > a)
        .map(|(_, &m)| m)
        .sum()
}

/// `‖f‖*_{L^p_w} = (sup_a a^p λ_f(a))^{1/p}`, exact over the breakpoints of `|f|`.
pub fn weak_quasinorm<T: Scalar>(f: &[T], w: &[T], p: T) -> T {
    let v = sorted_desc(f, w);
    let mut best = T::zero();
    let mut mass = T::zero();
    let mut i = 0;
    while i < v.len() {
        let level = v[i].0;
        while i < v.len() && v[i].0 == level {
            mass += v[i].1;
            i += 1;
        }
        best = best.max(level.powf(p) * mass);
    }
    best.powf(T::one() / p)
}

/// Value of `‖f‖_{L^p_w}` and the number of leading sorted nodes in the maximizing set.
pub fn weak_norm_with_support<T: Scalar>(f: &[T], w: &[T], p: T) -> (T, usize) {
    let theta = T::one() - T::one() / p;
    let v = sorted_desc(f, w);
    let (mut best, mut arg) = (T::zero(), 0);
    let (mut s, mut m) = (T::zero(), T::zero());
    for (k, &(x, mass)) in v.iter().enumerate() {
        s += x * mass;
        m += mass;
        let r = s / m.powf(theta);
        if r > best {
            best = r;
            arg = k + 1;
        }
    }
    (best, arg)
}

/// `‖f‖_{L^p_w} = sup_ω ∫_ω |f| dτ / τ(ω)^{1/p'}` by the sorted-prefix scan, `p > 1`.
pub fn weak_norm<T: Scalar>(f: &[T], w: &[T], p: T) -> T {
    weak_norm_with_support(f, w, p).0
}

/// Indices (ascending) of the set attaining [`weak_norm`].
pub fn weak_norm_support<T: Scalar>(f: &[T], w: &[T], p: T) -> Vec<usize> {
    let (_, k) = weak_norm_with_support(f, w, p);
    let mut idx: Vec<usize> = (0..f.len()).filter(|&i| w[i] > T::zero()).collect();
    idx.sort_by(|&a, &b| {
        f[b].abs()
            .partial_cmp(&f[a].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut s: Vec<usize> = idx.into_iter().take(k).collect();
    s.sort_unstable();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator() {
        let f = [1.0, 1.0, 0.0, 0.0];
        let w = [0.25, 0.5, 1.0, 2.0];
        for p in [1.5f64, 2.0, 4.0] {
            assert!((weak_quasinorm(&f, &w, p) - 0.75f64.powf(1.0 / p)).abs() < 1e-15);
            assert!((weak_norm(&f, &w, p) - 0.75f64.powf(1.0 / p)).abs() < 1e-15);
        }
        assert_eq!(distribution_function(&f, &w, 0.5), 0.75);
        assert_eq!(distribution_function(&f, &w, 1.0), 0.0);
    }

    #[test]
    fn two_point_example() {
        // {x1}: 1/√½ = √2; {x1, x2}: 1.5/1 = 1.5; {x2}: √½
        let v: f64 = weak_norm(&[2.0, 1.0], &[0.5, 0.5], 2.0);
        assert!((v - 1.5).abs() < 1e-15);
        assert_eq!(weak_norm_support(&[2.0, 1.0], &[0.5, 0.5], 2.0), vec![0, 1]);
    }

    #[test]
    fn scaling_and_f32() {
        let f = [3.0f32, -1.0, 2.0];
        let w = [0.1f32, 0.7, 0.2];
        let a = weak_quasinorm(&f, &w, 2.0);
        let g: Vec<f32> = f.iter().map(|x| -2.5 * x).collect();
        assert!((weak_quasinorm(&g, &w, 2.0) - 2.5 * a).abs() < 1e-5);
    }
}
