//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by filter derivation, transforms, solvers and training.
#[derive(Debug, Error)]
pub enum Error {
    /// Polynomial order / quadrature order outside the supported range.
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),

    /// Argument outside the domain of definition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Gram-Schmidt lost rank while deriving the multiwavelet basis.
    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    /// Filter matrices violate the orthogonality constraint.
    #[error("filter validation failed: constraint residual {residual:.3e}")]
    FilterValidation { residual: f64 },

    /// Array shape incompatible with the requested operation.
    #[error("shape error: {0}")]
    Shape(String),

    /// Scale indices out of order (coarsest >= finest).
    #[error("scale error: {0}")]
    Scale(String),

    /// Kernel returned a non-finite sample.
    #[error("kernel evaluation error: {0}")]
    KernelEvaluation(String),

    /// Invalid random-field specification.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// Covariance factorization failure.
    #[error("covariance error: {0}")]
    Covariance(String),

    /// Time-stepping solver produced a non-finite state.
    #[error("solver divergence: {0}")]
    SolverDivergence(String),

    /// Boundary-value problem is singular (forcing frequency at resonance).
    #[error("resonance error: {0}")]
    Resonance(String),

    /// Diffusion coefficient not strictly positive.
    #[error("ellipticity error: {0}")]
    Ellipticity(String),

    /// Iterative linear solver failed to converge.
    #[error("solver error: {0}")]
    SolverFailure(String),

    /// Training loss became non-finite.
    #[error("training diverged at epoch {epoch}")]
    Divergence { epoch: usize },

    /// Relative error against a zero-norm target is undefined.
    #[error("degenerate target: zero-norm reference")]
    DegenerateTarget,

    /// Checkpoint / dataset / model mismatch.
    #[error("incompatible: {0}")]
    Incompatible(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed binary or text file.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
