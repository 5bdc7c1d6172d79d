use std::fmt;

use serde::Serialize;

/// Failure of a CLI run, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Every problem found in the configuration.
    Config(Vec<String>),
    Numerical(String),
    /// Lasing threshold or a near-singular solve, without an override.
    Singularity(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::Singularity(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Singularity(_) => "singularity",
            CliError::Io(_) => "io",
        }
    }

    fn messages(&self) -> Vec<String> {
        match self {
            CliError::Config(m) => m.clone(),
            CliError::Numerical(m) | CliError::Singularity(m) | CliError::Io(m) => vec![m.clone()],
        }
    }

    pub fn report(&self, command: &str) -> ErrorReport {
        ErrorReport {
            error: self.kind(),
            exit_code: self.exit_code(),
            command: command.to_string(),
            messages: self.messages(),
        }
    }
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub exit_code: i32,
    pub command: String,
    pub messages: Vec<String>,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.messages().join("; "))
    }
}

impl From<taa_core::Error> for CliError {
    fn from(e: taa_core::Error) -> Self {
        match e {
            taa_core::Error::InvalidParams(p) => CliError::Config(p),
            e if e.is_config() => CliError::Config(vec![e.to_string()]),
            e if e.is_singularity() => CliError::Singularity(e.to_string()),
            e => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
