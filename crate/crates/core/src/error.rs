//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operator shapes or dimensions do not match.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical routine failed (eigendecomposition, factorization, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The tomography design matrix does not have full column rank.
    #[error("rank-deficient design: {null_count} null direction(s), smallest singular value {smallest:.3e}")]
    RankDeficient { null_count: usize, smallest: f64 },

    /// An iterative solver or fitter ran out of budget. Carries the last
    /// iterate so callers can inspect how far it got.
    #[error("no convergence after {iterations} iterations (residual {residual:.6e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last_iterate: Box<crate::tomo::ChoiOperator>,
    },

    /// A derivative-free fit exhausted its evaluation budget.
    #[error("fit did not converge after {evaluations} evaluations (best infidelity {infidelity:.6e})")]
    FitBudgetExhausted {
        evaluations: usize,
        infidelity: f64,
        best: crate::noise::NoiseParams,
    },

    /// Scenario or simulation configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
