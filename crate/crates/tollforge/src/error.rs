use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("header <{header}>: {msg}")]
    Header { header: String, msg: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] tollforge_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 unreadable or invalid input,
    /// 3 infeasible demand, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Header { .. }
            | Error::Validation(_)
            | Error::Config(_)
            | Error::Io { .. }
            | Error::Csv(_)
            | Error::Json(_)
            | Error::UnknownInstance(_) => 2,
            Error::Core(tollforge_core::Error::Unreachable { .. }) => 3,
            Error::Core(
                tollforge_core::Error::InvalidNetwork(_)
                | tollforge_core::Error::InvalidDemand(_)
                | tollforge_core::Error::Domain(_)
                | tollforge_core::Error::LengthMismatch { .. }
                | tollforge_core::Error::OverBudget { .. }
                | tollforge_core::Error::Degenerate(_),
            ) => 2,
            _ => 1,
        }
    }
}
