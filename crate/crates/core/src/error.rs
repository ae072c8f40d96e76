use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while building, evaluating or rendering a GIFS.
#[derive(Debug, Error)]
pub enum GifsError {
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("map {0} is not affine")]
    NotAffine(usize),

    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("matrix I - sum(A_j) of map {0} is singular")]
    Singular(usize),

    #[error("fixed-point iteration for map {map} did not converge in {iterations} iterations")]
    NonConvergent { map: usize, iterations: usize },

    #[error("work of {needed} items exceeds budget of {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    #[error("coefficient tables do not cover level {level} address {index}")]
    LevelNotBuilt { level: usize, index: String },

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl GifsError {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        GifsError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, GifsError>;
