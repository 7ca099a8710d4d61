use thiserror::Error;

/// Errors produced by this crate.
///
/// The variants are grouped by responsibility so callers (notably the CLI)
/// can map them to distinct exit statuses: configuration problems, data
/// problems (I/O, parsing, shape or label issues), and numerical failures
/// detected during training or optimization.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter or option value supplied by the caller.
    #[error("config: {0}")]
    Config(String),

    /// Malformed, inconsistent or unusable input data.
    #[error("data: {0}")]
    Data(String),

    /// A computation produced non-finite values or failed to make progress.
    #[error("numerical: {0}")]
    Numerical(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
