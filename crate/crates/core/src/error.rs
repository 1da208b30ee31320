use thiserror::Error;

/// Error type shared by all modules.
///
/// `Domain` means the input was well-formed but mathematically inadmissible
/// (failed precondition, inconsistent filtration, ...). `Usage` means the
/// input could not even be parsed or violated an interface contract.
/// `Precision` means a certification would have had to read a digit beyond
/// the tracked p-adic precision; it is never silently absorbed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Usage(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    /// Process exit code: 1 for domain/precision errors, 2 for usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Precision(_) => 1,
            Error::Usage(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
