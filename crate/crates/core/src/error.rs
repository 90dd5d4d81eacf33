use thiserror::Error;

/// Failure modes shared by the library, the CLI and the FFI layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no stabilization: {0}")]
    NonStabilization(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Precondition(_) => 3,
            Error::NonStabilization(_) => 4,
            Error::Invariant(_) => 5,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Precondition(_) => "precondition",
            Error::NonStabilization(_) => "non-stabilization",
            Error::Invariant(_) => "invariant",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
