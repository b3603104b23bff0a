use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A parameter fails its precondition; raised before any computation.
    #[error("invalid parameter `{parameter}`: {reason}")]
    Invalid { parameter: String, reason: String },

    #[error("computation failed: {0}")]
    Compute(#[from] biharmonic::Error),

    #[error("cannot read config `{path}`: {reason}")]
    Config { path: PathBuf, reason: String },

    #[error("cannot write `{path}`: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn invalid(parameter: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Invalid {
            parameter: parameter.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } | CliError::Config { .. } => 2,
            CliError::Compute(_) | CliError::Write { .. } => 1,
        }
    }
}

/// Re-label a core precondition failure with the command-line flag it came from.
pub(crate) fn as_flag(err: biharmonic::Error, flag: &str) -> CliError {
    match err {
        biharmonic::Error::InvalidParameter { reason, .. } => CliError::invalid(flag, reason),
        other => CliError::Compute(other),
    }
}
