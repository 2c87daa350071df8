use std::path::PathBuf;

use easr_core::{easr_clean, easr_clean_with_state, AsrState};
use serde::Serialize;

use super::{emit, json_string, key_value, provenance, ReportFormat};
use crate::config::{AlgoFlags, FileConfig};
use crate::error::{io_err, CliError};
use crate::files::{read_signal, write_bytes, write_signal, FileFormat};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Recording to clean.
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// Sampling rate for formats that do not store one.
    #[arg(long)]
    fs: Option<f64>,
    /// Channel label in a multichannel BDF file.
    #[arg(long)]
    channel: Option<String>,
    /// Cleaned signal destination.
    #[arg(long)]
    out: PathBuf,
    /// Output format; defaults to the output extension, then the input format.
    #[arg(long, value_enum)]
    out_format: Option<FileFormat>,
    /// Rejection and timing report; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    report_format: ReportFormat,
    /// Reuse a saved calibration instead of calibrating on the input.
    #[arg(long)]
    state_in: Option<PathBuf>,
    /// Save the calibration used.
    #[arg(long)]
    state_out: Option<PathBuf>,
    #[command(flatten)]
    algo: AlgoFlags,
}

#[derive(Serialize)]
struct CleanReport<'a> {
    version: &'a str,
    config: &'a FileConfig,
    input: String,
    channel: &'a str,
    samples: usize,
    fs: f64,
    windows: usize,
    windows_with_rejection: usize,
    rejected_components: usize,
    elapsed_s: f64,
    rejection_report: &'a [easr_core::WindowReport],
}

pub fn run(args: Args, mut cfg: FileConfig) -> Result<(), CliError> {
    args.algo.apply(&mut cfg);
    let in_format = FileFormat::resolve(args.format, &args.input)?;
    let out_format = args
        .out_format
        .or_else(|| FileFormat::infer(&args.out))
        .unwrap_or(in_format);
    let signal = read_signal(&args.input, in_format, args.fs, args.channel.as_deref())?;

    let easr = cfg.easr();
    let result = match &args.state_in {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            easr_clean_with_state(&signal, &easr, &AsrState::from_json(&text)?)?
        }
        None => easr_clean(&signal, &easr)?,
    };
    write_signal(&args.out, &result.cleaned, out_format)?;
    if let Some(p) = &args.state_out {
        write_bytes(p, result.state.to_json()?.as_bytes())?;
    }

    let report = CleanReport {
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg,
        input: args.input.display().to_string(),
        channel: signal.label(),
        samples: signal.len(),
        fs: signal.fs(),
        windows: result.rejection_report.len(),
        windows_with_rejection: result.windows_with_rejection(),
        rejected_components: result.total_rejected(),
        elapsed_s: result.elapsed,
        rejection_report: &result.rejection_report,
    };
    let text = match args.report_format {
        ReportFormat::Json => json_string(&report)?,
        ReportFormat::Text | ReportFormat::Csv => {
            let mut pairs = provenance(&cfg, None);
            pairs.extend([
                ("input", report.input.clone()),
                ("channel", report.channel.to_string()),
                ("samples", report.samples.to_string()),
                ("fs", report.fs.to_string()),
                ("windows", report.windows.to_string()),
                ("windows_with_rejection", report.windows_with_rejection.to_string()),
                ("rejected_components", report.rejected_components.to_string()),
                ("elapsed_s", format!("{:.6}", report.elapsed_s)),
            ]);
            let mut text = key_value(&pairs);
            if args.report_format == ReportFormat::Csv {
                text = super::csv_preamble(&pairs);
                text.push_str("start,len,rejected\n");
                for w in &result.rejection_report {
                    text.push_str(&format!("{},{},{}\n", w.start, w.len, w.rejected.len()));
                }
            }
            text
        }
    };
    emit(args.report.as_deref(), &text)
}
