//! Numerical laboratory for the Hardy-potential operator `L_μ = Δ + μ/δ²`,
//! `δ` the distance to the boundary, on a disk and on a truncated half-space.
//!
//! The crate computes the exponents and spectral constants of `L_μ`, its Green
//! and Martin kernels, normalized boundary traces, and solutions of the linear
//! problem `-L_μ u = τ` and the absorption problem `-L_μ u + u^q = 0` with
//! measure boundary data.
//!
//! Linear algebra and the closed-form exponent and weak-`L^p` routines are
//! generic over [`Scalar`]; the discretization works in `f64`.

pub mod acceptance;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod linear;
pub mod measures;
pub mod nonlinear;
pub mod operator;
pub mod regularizing;
pub mod scalar;
pub mod spectral;
pub mod trace;
pub mod weaklp;

pub use error::{HardyError, Result};
pub use geometry::{DomainKind, DomainSpec, Field, Grading, Grid, GridOptions, Point, Ray};
pub use measures::{Atom, BoundaryDensity, BoundaryMeasure, InteriorMeasure};
pub use operator::{Backend, DiscreteOperator};
pub use scalar::Scalar;

pub type SparseMatrix = linalg::CsrMatrix<f64>;
pub use spectral::{exponents, HardyExponents};

pub type Exponents = HardyExponents<f64>;
