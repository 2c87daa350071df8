pub mod bench;
pub mod clean;
pub mod evaluate;
pub mod simulate;

use std::path::Path;

use clap::ValueEnum;

use crate::config::FileConfig;
use crate::error::CliError;
use crate::files::write_bytes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Json,
}

/// Header pairs written at the top of every report.
pub fn provenance(cfg: &FileConfig, seed: Option<u64>) -> Vec<(&'static str, String)> {
    let mut out = vec![("version", env!("CARGO_PKG_VERSION").to_string())];
    if let Some(s) = seed {
        out.push(("seed", s.to_string()));
    }
    out.push(("config", cfg.echo()));
    out
}

/// `key = value` lines.
pub fn key_value(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Same pairs as `# ` comment lines, prepended to CSV output.
pub fn csv_preamble(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_bytes(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn json_string<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Numeric(format!("cannot serialize report: {e}")))
}
