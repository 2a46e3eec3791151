use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    /// A point or sub-domain request that falls outside the domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Boundary projection requested for a point outside the uniqueness collar.
    #[error("point at distance {delta} from the boundary is outside the collar (beta0 = {beta0})")]
    Collar { delta: f64, beta0: f64 },

    /// A level or exhaustion parameter outside its admissible range.
    #[error("{what} = {value} outside the admissible range ({lo}, {hi})")]
    Range {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Invalid physical or numerical parameter.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Fields or operators built on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The operator is not positive definite (μ at or above the discrete Hardy constant).
    #[error("operator is not positive definite: {negative_pivots} negative pivot(s) (mu = {mu})")]
    Indefinite { mu: f64, negative_pivots: usize },

    /// An iterative method failed to reach its tolerance; carries the residual trace.
    #[error("{method} did not converge after {iterations} iterations (last residual {last:.3e})")]
    Convergence {
        method: &'static str,
        iterations: usize,
        last: f64,
        trace: Vec<f64>,
    },

    /// The Martin ε-ladder ratios are non-monotone beyond tolerance.
    #[error("Martin extrapolation unstable at {nodes} node(s); ε-ladder {eps:?}")]
    Instability { nodes: usize, eps: Vec<f64> },

    /// A claimed monotone sequence was violated beyond tolerance.
    #[error("monotonicity violated by {violation:.3e} in {stage}")]
    Monotonicity { stage: &'static str, violation: f64 },

    /// A test function failed its admissibility certificate.
    #[error("test function {tag} not admissible: {reason}")]
    Admissibility { tag: String, reason: String },

    /// A requested point is not a grid node and snapping is disabled.
    #[error("point {point:?} is not a grid node (nearest at distance {distance:.3e})")]
    NotANode { point: [f64; 2], distance: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T, E = HardyError> = std::result::Result<T, E>;
