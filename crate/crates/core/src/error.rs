use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model, trend, kernel or config violates its invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// A quadrature or other iterative routine missed its tolerance.
    #[error("numerical error: {message} (achieved error estimate {achieved:e})")]
    Numerical { message: String, achieved: f64 },

    /// The circulant embedding of the covariance has a significantly negative eigenvalue.
    #[error("EMBEDDING_NOT_PSD: minimum eigenvalue {min_eigenvalue:e} with embedding size {size}")]
    EmbeddingNotPsd { min_eigenvalue: f64, size: usize },

    /// An operation was called in a state where it is not allowed.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub(crate) fn numerical(message: impl Into<String>, achieved: f64) -> Self {
        LabError::Numerical {
            message: message.into(),
            achieved,
        }
    }
}
