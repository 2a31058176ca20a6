//! Command errors carrying their sysexits-style process exit code.

use std::fmt;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_RESOURCE: i32 = 70;
pub const EXIT_IO: i32 = 74;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn resource(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_RESOURCE,
            message: message.into(),
        }
    }

    /// Library errors surfacing through a command with otherwise valid
    /// arguments: resource exhaustion keeps its own code, the rest are
    /// argument problems.
    pub fn from_lib(e: pqgame::Error) -> Self {
        match e {
            pqgame::Error::Resource(msg) => CliError::resource(msg),
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<pqgame::Error> for CliError {
    fn from(e: pqgame::Error) -> Self {
        CliError::from_lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}
