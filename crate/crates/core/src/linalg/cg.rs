use crate::error::{HardyError, Result};
use crate::scalar::Scalar;

use super::{axpy, dot, CsrMatrix};

#[derive(Debug, Clone, Copy)]
pub struct CgOptions<T> {
    /// Relative residual target `‖b - Ax‖ / ‖b‖`.
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for CgOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            max_iter: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub rel_residual: T,
}

/// Jacobi-preconditioned conjugate gradient for symmetric positive definite
/// systems. Negative curvature `pᵀAp <= 0` is reported as indefiniteness.
pub fn conjugate_gradient<T: Scalar>(
    a: &CsrMatrix<T>,
    b: &[T],
    x0: Option<&[T]>,
    opts: CgOptions<T>,
) -> Result<CgOutcome<T>> {
    let n = a.n();
    let inv_diag: Vec<T> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > T::zero() { T::one() / d } else { T::one() })
        .collect();
    let bnorm = dot(b, b).sqrt();
    let mut x = x0.map(<[T]>::to_vec).unwrap_or_else(|| vec![T::zero(); n]);
    if bnorm == T::zero() {
        return Ok(CgOutcome {
            x: vec![T::zero(); n],
            iterations: 0,
            rel_residual: T::zero(),
        });
    }
    let mut r = a.mul_vec(&x);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut ap = vec![T::zero(); n];
    let mut rz = dot(&r, &z);
    let mut trace = Vec::new();
    for it in 0..opts.max_iter {
        let res = dot(&r, &r).sqrt() / bnorm;
        if it % 50 == 0 {
            trace.push(res.to_f64_lossy());
        }
        if res <= opts.rel_tol {
            return Ok(CgOutcome {
                x,
                iterations: it,
                rel_residual: res,
            });
        }
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            return Err(HardyError::Indefinite {
                mu: f64::NAN,
                negative_pivots: 1,
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        for ((zi, &ri), &di) in z.iter_mut().zip(&r).zip(&inv_diag) {
            *zi = ri * di;
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let last = (dot(&r, &r).sqrt() / bnorm).to_f64_lossy();
    trace.push(last);
    Err(HardyError::Convergence {
        method: "conjugate gradient",
        iterations: opts.max_iter,
        last,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    #[test]
    fn solves_1d_laplacian_in_f32_and_f64() {
        fn run<T: Scalar>(tol: f64) {
            let n = 50;
            let mut b = TripletBuilder::<T>::new(n);
            for i in 0..n - 1 {
                b.add_edge(i, i + 1, T::one());
            }
            b.add(0, 0, T::one());
            b.add(n - 1, n - 1, T::one());
            let a = b.build();
            let rhs = vec![T::one(); n];
            let out = conjugate_gradient(
                &a,
                &rhs,
                None,
                CgOptions {
                    rel_tol: T::lit(tol),
                    max_iter: 1000,
                },
            )
            .unwrap();
            let r = a.mul_vec(&out.x);
            for ri in r {
                assert!((ri - T::one()).abs() < T::lit(tol * 1e3));
            }
        }
        run::<f64>(1e-12);
        run::<f32>(1e-5);
    }

    #[test]
    fn reports_indefinite() {
        let mut b = TripletBuilder::<f64>::new(2);
        b.add(0, 0, 1.0);
        b.add(1, 1, -1.0);
        let err = conjugate_gradient(&b.build(), &[0.0, 1.0], None, CgOptions::default());
        assert!(matches!(err, Err(HardyError::Indefinite { .. })));
    }
}
