use thiserror::Error;

/// Errors produced by the code constructions, decoders and simulators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain accepted by an operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Division by the zero element of a finite field.
    #[error("division by zero in GF(2^{m})")]
    DivisionByZero { m: u32 },
    /// A construction produced a matrix of deficient rank.
    #[error("rank deficiency: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },
    /// An exhaustive computation would be too large to run.
    #[error("refused: {0}")]
    Refused(String),
    /// A numeric routine failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A text input could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
