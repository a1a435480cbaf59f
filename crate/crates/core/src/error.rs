use thiserror::Error;

/// Failure modes shared across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of a function (e.g. a zero of Γ).
    #[error("domain error: {0}")]
    Domain(String),
    /// Parameters fall outside the regime an operation supports.
    #[error("regime error: {0}")]
    Regime(String),
    /// Numerical integration failed or hit a forbidden event.
    #[error("integration error: {0}")]
    Integration(String),
    /// A fit or estimate could not be resolved from the data.
    #[error("undetermined: {0}")]
    Undetermined(String),
    /// Invalid configuration or input file.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
