// SPDX-License-Identifier: Apache-2.0
use thiserror::Error;

/// Failures surfaced by file IO and the command-line tool.
#[derive(Debug, Error)]
pub enum ToolError {
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("invariant failed: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] homtensor_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ToolError {
    pub(crate) fn parse(location: impl Into<String>, message: impl ToString) -> Self {
        Self::Parse { location: location.into(), message: message.to_string() }
    }

    /// Process exit status: 1 for failed invariants, 2 for usage and input errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invariant(_) => 1,
            Self::Core(_) => 1,
            Self::Parse { .. } | Self::Usage(_) | Self::Io(_) => 2,
        }
    }
}

pub type ToolResult<T> = Result<T, ToolError>;
