use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value {value} at {path} is outside the representable range [-99.9999, 99.9999]")]
    Range { value: f64, path: String },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("token count mismatch: expected {expected} tokens, found {found}")]
    TokenCount { expected: usize, found: usize },

    #[error("epsilon cap {eps} is infeasible: smallest attainable value is {min_attainable}")]
    InfeasibleCap { eps: f64, min_attainable: f64 },

    #[error("solver did not converge: {0}")]
    Solver(String),

    #[error("only {survivors} points survived post-processing, {required} required")]
    InsufficientPoints { survivors: usize, required: usize },

    #[error("degenerate normalization: reference front has zero span in objective {0}")]
    DegenerateNormalization(usize),
}
