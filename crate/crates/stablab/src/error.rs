use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config field `{field}`: {detail}")]
    Config { field: String, detail: String },
    #[error("bound `{bound}` does not apply: {reason}")]
    BoundNotApplicable { bound: String, reason: String },
    #[error(transparent)]
    Core(#[from] stablab_core::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub(crate) fn config_err(field: impl Into<String>, detail: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        field: field.into(),
        detail: detail.into(),
    }
}
