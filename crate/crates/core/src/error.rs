//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or construction parameter.
    #[error("config error: {0}")]
    Config(String),

    /// A prefix string contained a character other than '0' or '1'.
    #[error("invalid character {found:?} at index {position} in prefix string")]
    PrefixParse { position: usize, found: char },

    /// A forecaster produced an unusable probability.
    #[error("invalid forecast at day {day}: {reason}")]
    InvalidForecast { day: u64, reason: String },

    /// A mixture assigned zero marginal likelihood to the observed prefix.
    #[error("prior contradicted at day {day}: the observed prefix has probability zero under every component")]
    PriorContradicted { day: u64 },

    /// The outcome stream ended before the requested horizon.
    #[error("outcome stream exhausted: needed {needed} bits, got {got}")]
    OutcomesExhausted { needed: u64, got: u64 },

    /// Player 2's turn ran past its bit cap.
    #[error("termination bound violated: player 2 exceeded {cap} bits extending a prefix of length {prefix_len}")]
    CapExceeded { cap: u64, prefix_len: u64 },

    /// A Player 1 strategy returned an empty move.
    #[error("player 1 returned an empty string; a move must extend the prefix")]
    EmptyMove,

    /// Malformed row in a trace file.
    #[error("trace format error at row {row}: {message}")]
    TraceFormat { row: u64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
