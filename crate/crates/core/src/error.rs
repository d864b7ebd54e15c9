use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid quantization table: {0}")]
    InvalidTable(String),

    #[error("{kind} magnitude category {category} exceeds baseline limit {limit}")]
    EncodingRange {
        kind: &'static str,
        category: u32,
        limit: u32,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("PSNR of 0 dB makes the scalarized objective undefined")]
    DegenerateQuality,

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("all paired differences are zero")]
    DegenerateSamples,

    #[error("{path}: malformed image at byte {offset}: {message}")]
    Format {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Format { .. } | Error::Csv(_) => 3,
            Error::Config(_) | Error::Json(_) => 4,
            Error::Invariant(_) => 5,
            // domain errors surfaced from bad user input are configuration problems
            _ => 4,
        }
    }
}
