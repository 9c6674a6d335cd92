use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    /// An index, dimension or argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// User-provided data violates a type invariant (normalisation, Hermiticity, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A model or estimator was configured inconsistently.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A numerical routine failed (eigensolver, step-size underflow, root bracketing).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A computed object violates its invariants beyond tolerance.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// The quasi-pure construction is undefined because the leading eigenvector
    /// has vanishing concurrence.
    #[error("degenerate quasi-pure case: A^11_11 = {0:e}")]
    Degenerate(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
