use std::path::PathBuf;

use easr_core::metrics::full_report;
use easr_core::preprocess;
use easr_core::report::{to_csv, to_json, to_key_value, BlinkRow, QualityRow};

use super::{csv_preamble, emit, provenance, ReportFormat};
use crate::config::FileConfig;
use crate::error::CliError;
use crate::files::{read_signal, write_bytes, FileFormat};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    contaminated: PathBuf,
    #[arg(long)]
    cleaned: PathBuf,
    /// Enables RRMSE, CC and ground-truth band powers.
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    /// Pass the ground truth through the configured band-pass and notch
    /// first, so it matches what the cleaner produced.
    #[arg(long)]
    filter_truth: bool,
    /// Format of all inputs; inferred per file when omitted.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long)]
    channel: Option<String>,
    /// Processing time to include in the blink table, seconds.
    #[arg(long)]
    elapsed: Option<f64>,
    /// Subject column value in CSV output.
    #[arg(long, default_value = "1")]
    subject: String,
    #[arg(long, value_enum, default_value_t)]
    report_format: ReportFormat,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// With CSV output, also write the blink-count table here.
    #[arg(long)]
    blink_table: Option<PathBuf>,
}

pub fn run(args: Args, cfg: FileConfig) -> Result<(), CliError> {
    let load = |p: &PathBuf| {
        let f = FileFormat::resolve(args.format, p)?;
        read_signal(p, f, args.fs, args.channel.as_deref())
    };
    let contaminated = load(&args.contaminated)?;
    let cleaned = load(&args.cleaned)?;
    let truth = match &args.ground_truth {
        Some(p) if args.filter_truth => Some(preprocess(&load(p)?, &cfg.preprocess)?),
        Some(p) => Some(load(p)?),
        None => None,
    };
    let report = full_report(&contaminated, &cleaned, truth.as_ref(), &cfg.blink, args.elapsed)?;

    let pairs = provenance(&cfg, None);
    let channel = args.channel.clone().unwrap_or_else(|| cleaned.label().to_string());
    let text = match args.report_format {
        ReportFormat::Text => to_key_value(&report, &pairs),
        ReportFormat::Json => to_json(&report, &pairs)? + "\n",
        ReportFormat::Csv => {
            if let Some(p) = &args.blink_table {
                let mut t = csv_preamble(&pairs);
                t.push_str(&to_csv(&[BlinkRow::new(&args.subject, &channel, &report)])?);
                write_bytes(p, t.as_bytes())?;
            }
            csv_preamble(&pairs) + &to_csv(&[QualityRow::new(&args.subject, &channel, &report)])?
        }
    };
    emit(args.out.as_deref(), &text)
}
