use std::path::Path;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] lowrank_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }

    /// 2 for bad input, 3 for numerical degeneracy of valid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_input_error() => EXIT_DEGENERATE,
            _ => EXIT_INPUT,
        }
    }
}
