use std::io;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Arguments that violate an operation's precondition (k < m, letter out
    /// of range, mismatched alphabets, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Operation needs a capability the alphabet does not provide, e.g.
    /// reverse complement without a configured complement involution.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Exhaustive enumeration refused because it exceeds the safety budget.
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    /// Malformed input data (FASTA/FASTQ records, CSV metadata).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
