use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("particle filter diverged: every particle crossed a wall{}", fmt_step(*.step))]
    FilterDivergence { step: Option<usize> },

    #[error("tracker state inconsistency: {0}")]
    StateInconsistency(String),

    #[error("invalid walk script: {0}")]
    InvalidScript(String),

    #[error("{}: parse error{}: {message}", path.display(), fmt_line(*.line))]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_step(step: Option<usize>) -> String {
    step.map(|s| format!(" at step {s}")).unwrap_or_default()
}

fn fmt_line(line: Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

/// Coarse error category, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Io,
    Parse,
    Validation,
    Runtime,
}

impl Error {
    pub fn invalid_parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn invariant(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            name,
            detail: detail.into(),
        }
    }

    pub fn category(&self) -> Category {
        match self {
            Error::Io { .. } => Category::Io,
            Error::Parse { .. } => Category::Parse,
            Error::InvalidParameter { .. }
            | Error::InvalidInput(_)
            | Error::InvalidScript(_)
            | Error::Invariant { .. } => Category::Validation,
            Error::FilterDivergence { .. } | Error::StateInconsistency(_) => Category::Runtime,
        }
    }
}
