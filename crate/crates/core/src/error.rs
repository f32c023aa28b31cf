use thiserror::Error;

/// Coarse error class, used by callers (e.g. the CLI) to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad domain input: zero scalar, off-curve point, malformed hex, ...
    Validation,
    /// Mismatched operand widths or shapes.
    Argument,
    /// A multiplier plan that cannot be applied as requested.
    Plan,
    /// Malformed trace/report file content.
    Format,
    /// Filesystem trouble.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("plan error: {0}")]
    Plan(String),

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Validation(_) => ErrorKind::Validation,
            Error::Argument(_) => ErrorKind::Argument,
            Error::Plan(_) => ErrorKind::Plan,
            Error::Format { .. } => ErrorKind::Format,
            Error::Io(_) => ErrorKind::Io,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn plan(msg: impl Into<String>) -> Self {
        Error::Plan(msg.into())
    }

    pub fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
