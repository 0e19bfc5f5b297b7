use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("rank deficient: {0}")]
    Rank(String),
    #[error("instance too large: {0}")]
    Size(String),
    #[error("column {column} has an empty support")]
    DegenerateColumn { column: usize },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error("generation failed: {0}")]
    Generation(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
