use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No node remains non-activated at `t`, so the mean-field threshold is undefined.
    #[error("network saturated at t={t}: no non-activated nodes remain")]
    Saturated { t: f64 },

    #[error("no activations in period [{start}, {end}]")]
    UndefinedFraction { start: f64, end: f64 },

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
