//! CLI error type carrying the process exit code.
//!
//! Exit codes: 0 success, 1 input error (bad tables, bad config, bad usage),
//! 2 verification failure (a requested check did not hold), 3 partial
//! pipeline failure (some tables or backend calls failed; artifacts for the
//! successful part were still written).

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Input,
    Verification,
    Partial,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        match self {
            ExitKind::Input => 1,
            ExitKind::Verification => 2,
            ExitKind::Partial => 3,
        }
    }
}

/// An error that terminates the command with a message and an exit code.
#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Input,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Verification,
            message: message.into(),
        }
    }

    pub fn partial(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Partial,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::input(format!("i/o error: {err}"))
    }
}
