use thiserror::Error;

/// Errors surfaced by the core library.
///
/// `InvalidInput` covers malformed arguments (dimension mismatches, non-finite
/// values, out-of-range parameters). `ConfigRejected` covers hyperparameter
/// combinations that are syntactically valid but degenerate. `NumericalFailure`
/// means a computation produced non-finite state or a required factorization
/// broke down; learner state is poisoned afterwards.
#[derive(Debug, Error)]
pub enum SsrError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration rejected: {0}")]
    ConfigRejected(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, SsrError>;
