use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The input does not have the shape an operation requires (e.g. a
    /// covariance matrix that is not symmetric).
    #[error("structural error: {0}")]
    Structural(String),

    /// An argument lies outside the physical or mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Drift matrix has an eigenvalue with real part >= -tol.
    #[error("drift matrix is not Hurwitz-stable (max real part of spectrum = {max_real_part:e})")]
    Unstable { max_real_part: f64 },

    /// The Bures line element diverges when a symplectic eigenvalue touches 1.
    #[error("metric is singular: symplectic eigenvalue {nu} is within {tol:e} of 1")]
    SingularMetric { nu: f64, tol: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    /// Finite-difference step too small for the fidelity to resolve.
    #[error("step size {step:e} too small: 1 - F = {infidelity:e} is at working precision, use a larger step")]
    StepSize { step: f64, infidelity: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
