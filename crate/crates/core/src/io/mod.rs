//! Signal ingestion and output.

mod bdf;
mod text;

pub use bdf::{read_bdf, write_bdf, BdfHeader, BdfRecording, ChannelHeader, DIGITAL_MAX_24, DIGITAL_MIN_24};
pub use text::{read_csv, read_raw, write_csv, write_raw, RawEncoding};

use crate::error::Result;
use crate::signal::Signal;

/// Output format for a single cleaned channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalFormat {
    Csv,
    Raw(RawEncoding),
    /// Single-channel BDF. Uses 1 s records when the length allows it,
    /// otherwise one record spanning the whole signal.
    Bdf,
}

pub fn write_signal(signal: &Signal, format: SignalFormat) -> Result<Vec<u8>> {
    match format {
        SignalFormat::Csv => Ok(write_csv(signal).into_bytes()),
        SignalFormat::Raw(enc) => Ok(write_raw(signal, enc)),
        SignalFormat::Bdf => {
            let fs = signal.fs();
            let whole_seconds = fs.fract() == 0.0 && signal.len().is_multiple_of(fs as usize);
            let record = if whole_seconds { 1.0 } else { signal.duration() };
            write_bdf(&BdfRecording::from_signals(std::slice::from_ref(signal), record)?)
        }
    }
}

pub fn select_channel(recording: &BdfRecording, label: &str) -> Result<Signal> {
    recording.select_channel(label)
}
