use std::path::PathBuf;

use imprecise_markov::Error;
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(#[from] Error),

    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0} assertion(s) failed")]
    AssertionFailed(usize),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::AssertionFailed(_) => 1,
            CliError::Domain(Error::BudgetExceeded { .. }) => 4,
            CliError::Domain(Error::EmptyCredalSet) => 5,
            CliError::Domain(_) => 2,
            CliError::Io { .. } | CliError::Parse(_) => 3,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}
