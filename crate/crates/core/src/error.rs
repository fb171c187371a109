use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity {n} outside the supported range 1..={max}")]
    ArityOutOfRange { n: usize, max: usize },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("code {code} is not a partial assignment on {n} variables")]
    InvalidCode { n: usize, code: u32 },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not a goal function: {0}")]
    NotGoalFunction(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("duplicate variable x{0}")]
    DuplicateVariable(usize),
    #[error("unknown variable x{0}")]
    UnknownVariable(usize),
    #[error("inconsistent oracle: {0}")]
    InconsistentOracle(String),
}
