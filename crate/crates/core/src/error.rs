use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// The variants fall into two families that the command-line runner maps to
/// distinct exit codes: configuration problems (bad input, refused scenarios)
/// and numeric inconsistencies detected while computing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("arithmetic mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by a series with zero constant term")]
    DivisionByNonUnit,

    #[error("potential is not normalized: {0}")]
    Normalization(String),

    #[error("expansion needs half-integer powers of hbar: {0}")]
    HalfIntegerPower(String),

    #[error("no turning point: {0}")]
    NoTurningPoint(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by the input rather than by the computation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::ModeMismatch(_)
                | Error::Normalization(_)
                | Error::HalfIntegerPower(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
