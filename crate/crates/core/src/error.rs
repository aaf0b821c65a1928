use thiserror::Error;

/// Errors raised by model construction and numerical evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("null vector: norm {0:e} is not positive")]
    NullVector(f64),

    #[error("Chebyshev degree cap {cap} reached with best sup error {best_error:e}")]
    DegreeCap { cap: usize, best_error: f64 },

    #[error("no shared energy shell between initial and final packets")]
    NoSharedEnergyShell,

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
