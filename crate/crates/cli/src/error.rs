use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the scenario runner and its verbs.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] entdyn_core::Error),

    /// The scenario file or a command-line override is malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit status: 2 for configuration problems, 3 for numerical
    /// failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        use entdyn_core::Error as E;
        match self {
            Self::Config(_) | Self::Parse { .. } => 2,
            Self::Core(E::Domain(_) | E::Validation(_) | E::Configuration(_)) => 2,
            Self::Core(E::Numeric(_) | E::Integrity(_) | E::Degenerate(_)) => 3,
            Self::Io { .. } | Self::Csv(_) | Self::Json(_) => 4,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
