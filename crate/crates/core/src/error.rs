use thiserror::Error;

/// Broad failure category, used by callers (the CLI) to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad arguments or configuration.
    Config,
    /// Malformed or inconsistent input data.
    Data,
    /// Numerical or initialization failure at run time.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop edge ({0},{0}) is not allowed")]
    SelfLoop(u32),
    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(u32, u32),
    #[error("edge references node {0}, but the network has {1} nodes")]
    DanglingNode(u32, usize),
    #[error("node {0} is out of range for a network of {1} nodes")]
    NodeOutOfRange(u32, usize),
    #[error("node {0} has no footprint polygon")]
    MissingFootprint(u32),
    #[error("invalid month label {0:?}, expected YYYY-MM")]
    BadMonthLabel(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error("{0}")]
    Numeric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidInput(_) => ErrorCategory::Config,
            Error::Numeric(_) => ErrorCategory::Numeric,
            _ => ErrorCategory::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
