use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on graph structure, gains or parameters does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// An eigen-solver or factorization failed to produce a result.
    #[error("numeric failure in {context}: {message}")]
    Numeric { context: String, message: String },

    /// A problem would exceed the dense-matrix size guard.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Malformed input file.
    #[error("input error at line {line}: {message}")]
    Input { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Numeric {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
