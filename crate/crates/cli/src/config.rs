//! Config file loading. One TOML document with a section per module;
//! command-line flags are applied on top.

use std::path::{Path, PathBuf};

use easr_core::metrics::BlinkConfig;
use easr_core::{AsrConfig, EasrConfig, EmbeddingConfig, PreprocessConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "EASR_CONFIG";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub fs: f64,
    pub seed: u64,
    pub snr_db: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            fs: 500.0,
            seed: 0,
            snr_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub preprocess: PreprocessConfig,
    pub embedding: EmbeddingConfig,
    pub asr: AsrConfig,
    pub blink: BlinkConfig,
    pub simulate: SimulateConfig,
}

impl FileConfig {
    /// Reads `explicit` if given, else the file named by [`CONFIG_ENV`],
    /// else returns the defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let path: Option<PathBuf> = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn easr(&self) -> EasrConfig {
        EasrConfig {
            preprocess: self.preprocess.clone(),
            embedding: self.embedding.clone(),
            asr: self.asr.clone(),
        }
    }

    /// Effective configuration as one line of JSON, echoed into reports.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

/// Flags shared by every command that runs the cleaner.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct AlgoFlags {
    /// Embedding dimension (delay rows).
    #[arg(long)]
    pub m: Option<usize>,
    /// Cut-off parameter; smaller rejects more.
    #[arg(long)]
    pub k: Option<f64>,
    /// Processing window, seconds.
    #[arg(long)]
    pub window_s: Option<f64>,
    /// Mains notch frequency, Hz.
    #[arg(long)]
    pub notch: Option<f64>,
}

impl AlgoFlags {
    pub fn apply(&self, cfg: &mut FileConfig) {
        if let Some(m) = self.m {
            cfg.embedding.m = m;
        }
        if let Some(k) = self.k {
            cfg.asr.cutoff_k = k;
        }
        if let Some(w) = self.window_s {
            cfg.asr.process_window_s = w;
        }
        if let Some(f) = self.notch {
            cfg.preprocess.notch_freq = f;
        }
    }
}
