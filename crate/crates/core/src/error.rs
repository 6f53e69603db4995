use thiserror::Error;

/// Errors produced by the coded-caching library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("popularity input, line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("popularity input is empty or has no positive weight")]
    EmptyProfile,

    #[error("allocation has {budgets} budgets but grouping has {groups} groups")]
    AllocationMismatch { budgets: usize, groups: usize },

    #[error("strategy `{strategy}` cannot be used with this grouping: {reason}")]
    StrategyMismatch {
        strategy: &'static str,
        reason: String,
    },

    #[error("group {group} is allocated {budget} files of memory but only holds {files} files")]
    OverAllocated {
        group: usize,
        budget: f64,
        files: usize,
    },

    #[error("demand index {index} out of range for {files} files")]
    DemandOutOfRange { index: usize, files: usize },

    #[error("user {user} could not decode its requested file")]
    Undecodable { user: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that indicate a defect rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Undecodable { .. } | Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
