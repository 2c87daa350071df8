//! Single-channel CSV and raw little-endian float formats.

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Word size of a headerless little-endian IEEE-754 stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawEncoding {
    F32,
    F64,
}

impl RawEncoding {
    pub fn word_size(self) -> usize {
        match self {
            RawEncoding::F32 => 4,
            RawEncoding::F64 => 8,
        }
    }
}

/// Reads one numeric value per line. A single non-numeric first line is
/// treated as a header and becomes the signal label.
pub fn read_csv(text: &str, fs: f64) -> Result<Signal> {
    let mut samples = Vec::new();
    let mut label = String::from("ch1");
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => samples.push(v),
            Ok(v) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("non-finite value {v}"),
                })
            }
            Err(_) if idx == 0 => label = line.to_string(),
            Err(e) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("{line:?}: {e}"),
                })
            }
        }
    }
    Signal::new(samples, fs, label)
}

pub fn read_raw(bytes: &[u8], fs: f64, encoding: RawEncoding) -> Result<Signal> {
    let w = encoding.word_size();
    if !bytes.len().is_multiple_of(w) {
        return Err(Error::Format(format!(
            "raw stream of {} bytes is not a multiple of the {w}-byte word size",
            bytes.len()
        )));
    }
    let samples: Vec<f64> = match encoding {
        RawEncoding::F32 => bytes
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
            .collect(),
        RawEncoding::F64 => bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect(),
    };
    Signal::new(samples, fs, "ch1")
}

/// Writes one value per line with a header line holding the label.
/// Values use the shortest representation that parses back exactly.
pub fn write_csv(signal: &Signal) -> String {
    let mut out = String::with_capacity(signal.len() * 20);
    out.push_str(if signal.label().is_empty() {
        "value"
    } else {
        signal.label()
    });
    out.push('\n');
    for v in signal.samples() {
        out.push_str(&format!("{v:?}\n"));
    }
    out
}

pub fn write_raw(signal: &Signal, encoding: RawEncoding) -> Vec<u8> {
    let mut out = Vec::with_capacity(signal.len() * encoding.word_size());
    for &v in signal.samples() {
        match encoding {
            RawEncoding::F32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
            RawEncoding::F64 => out.extend_from_slice(&v.to_le_bytes()),
        }
    }
    out
}
