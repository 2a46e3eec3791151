//! Dense reference routes for small systems. These are oracles: they share
//! nothing with the banded and iterative code paths beyond the matrix entries.

use nalgebra::{DMatrix, DVector};

use crate::error::{HardyError, Result};

use super::CsrMatrix;

/// Solves `A x = b` by dense Cholesky.
pub fn cholesky_solve(a: &CsrMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let dense = a.to_dense();
    let chol = dense
        .cholesky()
        .ok_or_else(|| HardyError::Numerical("dense Cholesky failed: not SPD".into()))?;
    Ok(chol.solve(&DVector::from_column_slice(b)).as_slice().to_vec())
}

/// All eigenvalues (ascending) of the pencil `K v = λ diag(w) v` with `w > 0`.
pub fn generalized_eigenvalues(k: &CsrMatrix<f64>, w: &[f64]) -> Vec<f64> {
    let n = k.n();
    let s: Vec<f64> = w.iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut m: DMatrix<f64> = k.to_dense();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] *= s[i] * s[j];
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
