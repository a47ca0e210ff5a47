use std::io;

use thiserror::Error;
use weil_core::WeilError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Weil(#[from] WeilError),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    /// 2 for bad arguments, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Weil(e) if is_usage(e) => 2,
            _ => 1,
        }
    }
}

fn is_usage(e: &WeilError) -> bool {
    use WeilError::*;
    match e {
        NotPrime(_)
        | InvalidExponent(_)
        | InvalidDimension
        | EllEqualsP(_)
        | EllNotPrime(_)
        | ResidueLength { .. }
        | ResidueNotReduced { .. }
        | InvalidSamples
        | InvalidBoxScale
        | EmptyRange { .. }
        | BoxTooLarge
        | TooManyClasses { .. } => true,
        Sweep { source, .. } => is_usage(source),
        _ => false,
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(e) => CliError::Io(e),
            other => CliError::Internal(format!("csv: {other:?}")),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
