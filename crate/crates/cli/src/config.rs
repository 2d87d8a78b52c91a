//! Run configuration, written next to every output.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use structok_core::generate::{HarnessConfig, DEFAULT_ALPHA, DEFAULT_ORDER};
use structok_core::metrics::MetricConfig;
use structok_core::stats::{derive_seed, BootstrapConfig, DEFAULT_LEVEL, DEFAULT_RESAMPLES};

pub const RUN_CONFIG_FILE: &str = "run_config.json";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapSettings {
    pub resamples: usize,
    pub level: f64,
}

impl Default for BootstrapSettings {
    fn default() -> Self {
        Self {
            resamples: DEFAULT_RESAMPLES,
            level: DEFAULT_LEVEL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarkovSettings {
    pub order: usize,
    pub alpha: f64,
}

impl Default for MarkovSettings {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            alpha: DEFAULT_ALPHA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    /// Frame rate, consistency windows and SI bands live here.
    pub metrics: MetricConfig,
    pub bootstrap: BootstrapSettings,
    /// The harness seed is ignored; each notation's harness seed is derived
    /// from `seed`.
    pub harness: HarnessConfig,
    pub markov: MarkovSettings,
    pub out_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            metrics: MetricConfig::default(),
            bootstrap: BootstrapSettings::default(),
            harness: HarnessConfig::default(),
            markov: MarkovSettings::default(),
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn bootstrap_config(&self) -> BootstrapConfig {
        BootstrapConfig {
            level: self.bootstrap.level,
            resamples: self.bootstrap.resamples,
            seed: derive_seed(self.seed, &[SeedTag::Bootstrap as u64]),
        }
    }

    /// Harness settings for one notation, with its own seed.
    pub fn harness_for(&self, kind_code: u8) -> HarnessConfig {
        HarnessConfig {
            seed: derive_seed(self.seed, &[SeedTag::Harness as u64, u64::from(kind_code)]),
            ..self.harness.clone()
        }
    }

    /// Records `dir` as the output directory and writes the config there.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let mut cfg = self.clone();
        cfg.out_dir = Some(dir.display().to_string());
        crate::io::write_json(&dir.join(RUN_CONFIG_FILE), &cfg)
    }
}

#[repr(u64)]
enum SeedTag {
    Harness = 1,
    Bootstrap = 2,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"seed": 9, "harness": {"total_len": 512}}"#).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.harness.total_len, 512);
        assert_eq!(cfg.harness.primer_len, 256);
        assert_eq!(cfg.bootstrap.resamples, 9999);
        assert_eq!(cfg.metrics.windows, 10);
    }

    #[test]
    fn per_kind_seeds_differ() {
        let cfg = RunConfig::default();
        assert_ne!(cfg.harness_for(0).seed, cfg.harness_for(1).seed);
    }
}
