use std::io;

use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_WARNINGS: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("stage `{stage}` failed: {source}")]
    Numeric {
        stage: &'static str,
        #[source]
        source: bec_analogue::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric { .. } | CliError::Io { .. } => EXIT_NUMERIC,
        }
    }

    pub fn stage(stage: &'static str) -> impl FnOnce(bec_analogue::Error) -> CliError {
        move |source| CliError::Numeric { stage, source }
    }
}
