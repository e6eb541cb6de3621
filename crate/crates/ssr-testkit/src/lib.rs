//! Slow, independent reference implementations used to cross-check the fast
//! paths in `ssr-core`. Everything here favors directness over speed: explicit
//! objective evaluation, candidate comparison, and textbook iterations.
//!
//! Compiled only into test and benchmark builds of the main crates.

mod lasso_ref;
mod mirror;
mod prox;

pub use lasso_ref::lasso_pg_fit;
pub use mirror::md_sgd_oracle;
pub use prox::{prox_oracle, prox_subgradient_residual, HistoryWeights, ProxInstance};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TestkitError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unbounded objective: {0}")]
    Unbounded(String),
    #[error("diverged: {0}")]
    Diverged(String),
}

pub type Result<T> = std::result::Result<T, TestkitError>;
