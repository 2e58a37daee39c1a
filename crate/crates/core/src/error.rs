use thiserror::Error;

/// Errors raised by constructors and operations whose preconditions fail.
///
/// Verdict-style checks (frame validation, interplay conditions, validity)
/// never use this type for a negative answer; they return a
/// [`CheckReport`](crate::frame::CheckReport) instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: expected one of {}", .expected.join(", "))]
    Syntax { offset: usize, expected: Vec<String> },

    #[error("state {state} is out of range (structure has {n} states)")]
    StateOutOfRange { state: usize, n: usize },

    #[error("{0} states requested but at most 64 are supported")]
    TooManyStates(usize),

    #[error("relation is not a partial order: {0}")]
    NotPartialOrder(String),

    #[error("unknown modal index `{0}`")]
    UnknownIndex(String),

    #[error("variable `{0}` has no value in the valuation")]
    UnboundVariable(String),

    #[error("valuation of `{0}` is not an admissible proposition")]
    InadmissibleValuation(String),

    #[error("unknown condition `{0}`")]
    UnknownCondition(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("structures do not match: {0}")]
    Mismatch(String),

    #[error("evaluation budget of {0} steps exceeded")]
    BudgetExceeded(u64),

    #[error("malformed document at line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
