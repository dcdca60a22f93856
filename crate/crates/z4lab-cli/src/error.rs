//! CLI error type carrying the intended process exit code.

use std::fmt::Display;

/// Failure classes of a CLI run. `Usage` exits with status 2 (bad arguments,
/// malformed or invalid configuration), `Domain` with status 1 (the requested
/// computation failed: no sign change in a bracket, a divergent orbit,
/// parameters outside a reduction window, I/O trouble, ...).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }
}

/// Wraps any displayable error as a domain failure (exit status 1).
pub fn domain(e: impl Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// Wraps any displayable error as a usage failure (exit status 2).
pub fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(format!("I/O error: {e}"))
    }
}
