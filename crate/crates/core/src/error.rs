use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("geometric error: {0}")]
    Geometric(String),
    #[error("degenerate foliation: {0}")]
    DegenerateFoliation(String),
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-smooth point: {0}")]
    NonSmooth(String),
    #[error("reconstruction error: {0}")]
    Reconstruction(String),
    #[error("surfaces are not flip-equivalent: {0}")]
    Mismatch(String),
    #[error("canonicalization did not terminate: {0}")]
    Canonicalization(String),
    #[error("quadrature did not converge: {0}")]
    Precision(String),
    #[error("resource budget exceeded: {what} (partial result of {partial} items)")]
    Resource { what: String, partial: usize },
    #[error("fit error: {0}")]
    Fit(String),
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
