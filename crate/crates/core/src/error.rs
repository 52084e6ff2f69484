use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("domain error: {message} (value {value})")]
    Domain { value: f64, message: String },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diag:e})")]
    Convergence { sweeps: usize, off_diag: f64 },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("matrix is singular")]
    Singular,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("degenerate points: {0}")]
    DegeneratePoints(String),

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    Asymmetric { asymmetry: f64 },

    #[error("matrix format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(value: f64, message: impl Into<String>) -> Self {
        Error::Domain {
            value,
            message: message.into(),
        }
    }

    pub(crate) fn shape(message: impl Into<String>) -> Self {
        Error::Shape(message.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
