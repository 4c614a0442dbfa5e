use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Engine(#[from] zonovol::Error),
}

impl CliError {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}
