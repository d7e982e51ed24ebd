use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("quadrature under-resolved: {0}")]
    Resolution(String),
    #[error("normalization did not converge: {0}")]
    Normalization(String),
    #[error("degenerate chart: {0}")]
    Chart(String),
    #[error("pole evaluation needs a limit: {0}")]
    Pole(String),
    #[error("packing failed: {0}")]
    Packing(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
