//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by dataset loading, graph construction, eigensolvers and
/// the clustering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Experiment configuration failed validation; every violated field is
    /// listed on its own line.
    #[error("invalid configuration:\n{}", issues.join("\n"))]
    Config { issues: Vec<String> },

    /// A file did not match its expected binary or textual format.
    #[error("{path}: format error: {reason}")]
    Format { path: PathBuf, reason: String },

    /// A file ended before its declared payload was complete.
    #[error("{path}: truncated: expected {expected} bytes of payload, found {actual}")]
    Truncated {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },

    /// Two inputs that must describe the same collection disagree.
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    /// A cell of a text file could not be parsed as a number.
    #[error("{path}:{line}: parse error in column {column}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        reason: String,
    },

    /// The operator does not have enough nonzero eigenvalues to satisfy the
    /// request; reports the connected-component count behind the deficit.
    #[error(
        "rank deficiency: requested {requested} nonzero eigenpairs but only {available} exist \
         (graph has {components} connected components)"
    )]
    Rank {
        requested: usize,
        available: usize,
        components: usize,
    },

    /// A numerical contract was violated (e.g. a residual or sign condition).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A structural contract on the inputs was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that indicate bad user input (CLI exit code 2) rather
    /// than a runtime failure (exit code 1).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_)
                | Error::Config { .. }
                | Error::Format { .. }
                | Error::Truncated { .. }
                | Error::Parse { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
