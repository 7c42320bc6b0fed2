use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug)]
pub enum Error {
    /// Incompatible shapes or dimensions.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Mode index outside `1..=d`.
    #[error("mode {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },

    /// Multi-index outside the tensor bounds.
    #[error("index out of bounds: {0}")]
    IndexOutOfBounds(String),

    /// Invalid argument or failed validation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Problem size exceeds a documented cap.
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),

    /// Numerical failure (divergence, breakdown, non-finite values).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed file contents.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
