use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid alignment: {0}")]
    Alignment(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
