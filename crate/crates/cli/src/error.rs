use std::path::PathBuf;

use crate::config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Solver {
        context: String,
        #[source]
        source: squeezecav_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl RunError {
    pub fn solver(context: impl Into<String>, source: squeezecav_core::Error) -> Self {
        RunError::Solver {
            context: context.into(),
            source,
        }
    }

    /// Process exit code: 2 config, 3 solver, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver { .. } | RunError::Invariant(_) => 3,
            RunError::Io { .. } => 4,
        }
    }
}
