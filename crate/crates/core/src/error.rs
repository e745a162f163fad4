use thiserror::Error;

/// Errors raised by the lab's numerical and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("capacity exceeded: dimension {requested} is above the cap of {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    ChannelValidation(String),

    #[error("partition error: measured sites {measured:?} overlap disturbed sites {disturbed:?}")]
    Partition {
        measured: Vec<usize>,
        disturbed: Vec<usize>,
    },

    #[error("surface error: {0}")]
    Surface(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
