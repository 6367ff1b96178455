use thiserror::Error;

/// Errors surfaced by evaluation and checking routines.
#[derive(Debug, Error)]
pub enum CertError {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or iteration failed to converge within its budget.
    #[error("precision error: {0}")]
    Precision(String),
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, CertError>;
