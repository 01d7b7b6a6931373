use thiserror::Error;

/// Error kinds shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated a documented precondition (non-Hermitian input,
    /// broken projection, empty sequence, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A linear system or eigensolver could not be completed reliably.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    /// The argument lies outside the mathematical domain of the map.
    #[error("domain error: {0}")]
    Domain(String),

    /// Index, shift or support outside the truncation window.
    #[error("range error: {0}")]
    Range(String),

    /// A scalar function was not finite at a point of the spectrum.
    #[error("function not finite at eigenvalue {re}{im:+}i")]
    Evaluation { re: f64, im: f64 },

    /// Two independently computed quantities that must agree did not.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Exhaustive probing ended without distinguishing two inputs known to differ.
    #[error("no separating witness found: {0}")]
    WitnessNotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
