//! Command implementations for the `structok` tool.
//!
//! Every command is a plain function so the binary, the integration tests
//! and scripted runs share one code path. Batch commands are lenient: a file
//! that fails is reported in the command's summary and the rest go on.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod experiment;
pub mod io;
pub mod manifest;
pub mod survey;
pub mod tables;

use serde::Serialize;
use thiserror::Error;

pub use config::RunConfig;
pub use manifest::{DatasetManifest, ManifestEntry, Split};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("no input files found")]
    NoInputs,
    #[error("all {0} inputs failed")]
    AllInputsFailed(usize),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("manifest has no files in the {0} split")]
    EmptySplit(&'static str),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("text token files need --kind")]
    KindRequired,
    #[error("piece spans {frames} analysis frames; at least 2 are needed")]
    TooShort { frames: usize },
    #[error("no valid survey rows")]
    EmptySurvey,
}

/// Per-file failure recorded by batch commands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileError {
    pub path: String,
    pub error: String,
}

impl FileError {
    pub fn new(path: impl Into<String>, err: &anyhow::Error) -> Self {
        Self {
            path: path.into(),
            error: format!("{err:#}"),
        }
    }
}
