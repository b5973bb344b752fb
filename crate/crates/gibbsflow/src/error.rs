use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("corrupt ensemble at byte offset {offset}: {detail}")]
    Format { offset: u64, detail: String },
    #[error("fingerprint mismatch: file has {file:016x}, requested config has {requested:016x}")]
    Fingerprint { file: u64, requested: u64 },
    #[error(transparent)]
    Core(#[from] gibbsflow_core::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Fingerprint { .. } => "fingerprint",
            CliError::Core(e) => e.kind(),
        }
    }

    /// `error kind=<kind> message=<json string>` on one line.
    pub fn one_line(&self) -> String {
        format!("error kind={} message={}", self.kind(), serde_json::Value::String(self.to_string()))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
