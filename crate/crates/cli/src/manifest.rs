//! Dataset manifests: a JSON list of MIDI files with their split roles.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use structok_core::tokenizer::RepresentationKind;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative paths resolve against the manifest's directory.
    pub path: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub files: Vec<ManifestEntry>,
    /// Notation to use; both are processed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<RepresentationKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A manifest together with the directory its paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub manifest: DatasetManifest,
    pub root: PathBuf,
}

impl DatasetManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<LoadedManifest> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        let manifest: DatasetManifest = serde_json::from_str(&text)
            .with_context(|| format!("parsing manifest {}", path.display()))?;
        manifest.validate()?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedManifest { manifest, root })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let mut seen = HashSet::new();
        for f in &self.files {
            if !seen.insert(f.path.as_str()) {
                return Err(CliError::InvalidManifest(format!("duplicate path '{}'", f.path)));
            }
        }
        Ok(())
    }

    pub fn kinds(&self) -> Vec<RepresentationKind> {
        match self.kind {
            Some(k) => vec![k],
            None => RepresentationKind::ALL.to_vec(),
        }
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.files.iter().filter(move |f| f.split == split)
    }
}

impl LoadedManifest {
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.root.join(&entry.path)
    }

    /// Fails unless every listed split has at least one file.
    pub fn require_splits(&self, splits: &[Split]) -> Result<(), CliError> {
        for &s in splits {
            if self.manifest.split(s).next().is_none() {
                return Err(CliError::EmptySplit(s.name()));
            }
        }
        Ok(())
    }
}
