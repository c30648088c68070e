use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("empty input")]
    EmptyInput,

    #[error("{count} variables exceeds the cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },

    #[error("width mismatch: expected {expected} bits, got {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("unsupported formula structure: {0}")]
    UnsupportedStructure(String),

    #[error("cannot transform gate {index} ({gate}): {reason}")]
    Transform {
        index: usize,
        gate: String,
        reason: String,
    },

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("budget of {budget} evaluations is below the minimum of {minimum}")]
    InvalidBudget { budget: usize, minimum: usize },

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("no solutions: the function is identically false")]
    Unsatisfiable,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
