use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Schema or validation failure; `path` names the offending field.
    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Core(#[from] matconc_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report has no {0}")]
    EmptyReport(&'static str),
}

pub type Result<T> = std::result::Result<T, CliError>;
