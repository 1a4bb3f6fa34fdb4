use thiserror::Error;

/// Errors raised by the algebra, the solvers and the harnesses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Precondition violated: bad degree, index, knot, or argument count.
    #[error("domain error: {0}")]
    Domain(String),

    /// Shapes of two operands do not fit together.
    #[error("dimension mismatch: {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// A tensor or vector contained NaN or an infinity.
    #[error("non-finite entry in {0}")]
    NonFinite(String),

    /// Integration produced a non-finite value.
    #[error("numerical blowup at step {step} in component {component}")]
    Blowup { step: usize, component: usize },

    /// The requested configuration is outside what is implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Too many Monte Carlo paths had to be excluded from a study.
    #[error("{excluded} of {paths} paths blew up (limit is 1%)")]
    TooManyExclusions { excluded: usize, paths: usize },

    /// Invalid configuration field (CLI).
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { what, expected, found })
    }
}
