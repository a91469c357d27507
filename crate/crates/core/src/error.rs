use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("unsupported tuple arity {0}")]
    InvalidArity(u32),
    #[error("motif size {0} is not supported (2 <= s <= 8)")]
    SizeUnsupported(usize),
    #[error("work estimate {required} exceeds budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge density is degenerate (0 or 1)")]
    DegenerateDensity,
    #[error("precondition failed{}: {reason}", index.map(|i| format!(" at index {i}")).unwrap_or_default())]
    PreconditionFailed { index: Option<usize>, reason: String },
    #[error("corrupt or unsupported graph file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
