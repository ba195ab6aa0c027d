use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    Singular(String),

    /// A ratio of expectation values needs every entry positive.
    #[error("undefined signal: {0}")]
    UndefinedSignal(String),

    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("corrupt data: {0}")]
    Corrupt(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Coarse error classes, one process exit code each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numeric,
    Io,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 2,
            ErrorClass::Numeric => 3,
            ErrorClass::Io => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Config => "config",
            ErrorClass::Numeric => "numeric",
            ErrorClass::Io => "io",
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::Range(_) | Error::Domain(_) => ErrorClass::Config,
            Error::Singular(_) | Error::UndefinedSignal(_) | Error::NonConvergence { .. } => {
                ErrorClass::Numeric
            }
            Error::Corrupt(_) | Error::Io(_) => ErrorClass::Io,
        }
    }
}
