//! Reading and writing single-channel signal files.

use std::path::Path;

use clap::ValueEnum;
use easr_core::io::{read_csv, read_raw, RawEncoding};
use easr_core::{read_bdf, Signal, SignalFormat};

use crate::error::{io_err, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Csv,
    Raw32,
    Raw64,
    Bdf,
}

impl FileFormat {
    /// Guess from the file extension.
    pub fn infer(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        Some(match ext.as_str() {
            "csv" | "txt" => FileFormat::Csv,
            "bdf" => FileFormat::Bdf,
            "f32" => FileFormat::Raw32,
            "f64" | "bin" | "raw" => FileFormat::Raw64,
            _ => return None,
        })
    }

    pub fn resolve(explicit: Option<Self>, path: &Path) -> Result<Self, CliError> {
        explicit.or_else(|| Self::infer(path)).ok_or_else(|| {
            CliError::Usage(format!(
                "cannot infer the format of {}; pass a format flag",
                path.display()
            ))
        })
    }

    fn output(self) -> SignalFormat {
        match self {
            FileFormat::Csv => SignalFormat::Csv,
            FileFormat::Raw32 => SignalFormat::Raw(RawEncoding::F32),
            FileFormat::Raw64 => SignalFormat::Raw(RawEncoding::F64),
            FileFormat::Bdf => SignalFormat::Bdf,
        }
    }
}

/// Loads one channel. BDF files carry their own rate and need `channel`
/// when they hold more than one; the other formats need `fs`.
pub fn read_signal(
    path: &Path,
    format: FileFormat,
    fs: Option<f64>,
    channel: Option<&str>,
) -> Result<Signal, CliError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let need_fs =
        || fs.ok_or_else(|| CliError::Usage(format!("{} has no embedded sampling rate; pass --fs", path.display())));
    let signal = match format {
        FileFormat::Bdf => {
            let rec = read_bdf(&bytes)?;
            match channel {
                Some(label) => rec.select_channel(label)?,
                None if rec.channels().len() == 1 => rec.channels()[0].clone(),
                None => {
                    return Err(CliError::Usage(format!(
                        "{} holds {} channels; pick one with --channel (available: {})",
                        path.display(),
                        rec.channels().len(),
                        rec.labels().join(", ")
                    )))
                }
            }
        }
        FileFormat::Csv => {
            let text = String::from_utf8(bytes)
                .map_err(|_| CliError::Input(format!("{} is not UTF-8 text", path.display())))?;
            read_csv(&text, need_fs()?)?
        }
        FileFormat::Raw32 => read_raw(&bytes, need_fs()?, RawEncoding::F32)?,
        FileFormat::Raw64 => read_raw(&bytes, need_fs()?, RawEncoding::F64)?,
    };
    if let (Some(want), FileFormat::Bdf) = (fs, format) {
        if want != signal.fs() {
            log::warn!(
                "ignoring --fs {want}: {} is sampled at {} Hz",
                path.display(),
                signal.fs()
            );
        }
    }
    Ok(signal)
}

pub fn write_signal(path: &Path, signal: &Signal, format: FileFormat) -> Result<(), CliError> {
    let bytes = easr_core::io::write_signal(signal, format.output())?;
    write_bytes(path, &bytes)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}
