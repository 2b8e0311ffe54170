//! Experiment harness for the `dpbai-core` policies: JSON configs, seeded
//! parallel trials, CSV results and summaries, hardness reports and an
//! empirical privacy auditor.

pub mod audit;
pub mod config;
pub mod experiment;
pub mod presets;
pub mod report;
pub mod summary;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] dpbai_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("malformed rows:\n{}", format_malformed(.0))]
    Malformed(Vec<(u64, String)>),
    #[error("{0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn format_malformed(rows: &[(u64, String)]) -> String {
    rows.iter().map(|(line, why)| format!("  line {line}: {why}")).collect::<Vec<_>>().join("\n")
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| SimError::Json { path: path.into(), source })
}
