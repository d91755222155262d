use thiserror::Error;

/// Errors raised by the statistics, model and detector layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Fewer finite candidates remain than holes requested.
    #[error("insufficient survivors: need {needed}, have {available}")]
    InsufficientSurvivors { needed: usize, available: usize },

    #[error("channel index {index} out of range for {n} channels")]
    IndexOutOfRange { index: usize, n: usize },

    /// A retained channel has no measured energy.
    #[error("no energy recorded for retained channel {0}")]
    MissingEnergy(usize),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
