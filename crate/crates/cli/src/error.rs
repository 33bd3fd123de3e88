use std::io;
use std::path::PathBuf;

use heatpen_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}: {message}")]
    ConfigLine { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// Stable identifier printed in the `error: <kind>: ...` line.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::ConfigLine { .. } | Self::Config(_) => "config",
            Self::Core(CoreError::Unstable(_)) => "cfl",
            Self::Core(CoreError::InvalidSpec(_)) => "spec",
            Self::Core(_) => "solver",
            Self::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "config" | "spec" => 2,
            "cfl" => 3,
            "io" => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
