//! File formats, reports and the command implementations behind the
//! `divmax` binary.

pub mod canonical;
pub mod doc;
pub mod report;

use std::path::Path;

pub use doc::InstanceDoc;
pub use report::{solve, CompareReport, ExactReport, SolveConfig, SolveReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Certification(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<divmax_core::Error> for CliError {
    fn from(e: divmax_core::Error) -> Self {
        match e {
            divmax_core::Error::NotNegativeType(_) => CliError::Certification(e.to_string()),
            e if e.is_internal() => CliError::Internal(e.to_string()),
            e => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(format!("malformed JSON: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

pub fn read_instance(path: &Path) -> Result<InstanceDoc, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads a bare JSON array of scores.
pub fn read_scores(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}
