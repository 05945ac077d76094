//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("sampling exhausted after {tries} tries (box too small?)")]
    SamplingExhausted { tries: u64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("box does not contain the site set")]
    BoxExcludesSites,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
