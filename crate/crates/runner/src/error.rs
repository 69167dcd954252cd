use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config error: {0}")]
    Config(String),

    #[error("scenario `{scenario}`: missing required keys: {}", keys.join(", "))]
    MissingKeys { scenario: String, keys: Vec<String> },

    #[error("scenario `{scenario}`: unknown keys: {} (allowed: {})", keys.join(", "), allowed.join(", "))]
    UnknownKeys {
        scenario: String,
        keys: Vec<String>,
        allowed: Vec<String>,
    },

    #[error("scenario `{scenario}` failed: {source}")]
    Physics {
        scenario: String,
        #[source]
        source: abphase::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl RunnerError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunnerError::Physics {
                source: abphase::Error::InvalidParameter(_),
                ..
            } => 2,
            RunnerError::Physics { .. } | RunnerError::Io(_) | RunnerError::Csv(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, RunnerError>;

pub(crate) fn config(msg: impl Into<String>) -> RunnerError {
    RunnerError::Config(msg.into())
}
