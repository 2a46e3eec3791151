//! Sparse and banded symmetric linear algebra used by every solve.
//!
//! Three independent routes exist for the same symmetric systems: a
//! Jacobi-preconditioned conjugate gradient on CSR storage, a banded
//! LDLᵀ factorization (which also reports the matrix inertia), and dense
//! oracles backed by `nalgebra` for small instances.

mod band;
mod cg;
mod csr;
pub mod dense;

pub use band::{BandLdl, BandMatrix};
pub use cg::{conjugate_gradient, CgOptions, CgOutcome};
pub use csr::{CsrMatrix, TripletBuilder};

use crate::scalar::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
