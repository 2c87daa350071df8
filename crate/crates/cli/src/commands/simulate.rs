use std::path::PathBuf;

use easr_core::{build_semisim, SemiSimSpec};

use super::{key_value, provenance};
use crate::config::FileConfig;
use crate::error::CliError;
use crate::files::{write_bytes, write_signal, FileFormat};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory for the generated files.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Target signal-to-artifact ratio, dB.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FileFormat,
}

pub fn run(args: Args, mut cfg: FileConfig) -> Result<(), CliError> {
    let sim = &mut cfg.simulate;
    if let Some(s) = args.seed {
        sim.seed = s;
    }
    if let Some(v) = args.snr_db {
        sim.snr_db = v;
    }
    if let Some(f) = args.fs {
        sim.fs = f;
    }
    let mut spec = SemiSimSpec::synthetic(sim.fs, sim.seed)?;
    spec.snr_db = sim.snr_db;
    let out = build_semisim(&spec)?;

    let ext = match args.format {
        FileFormat::Csv => "csv",
        FileFormat::Bdf => "bdf",
        FileFormat::Raw32 => "f32",
        FileFormat::Raw64 => "f64",
    };
    let dir = &args.out_dir;
    write_signal(&dir.join(format!("contaminated.{ext}")), &out.contaminated, args.format)?;
    write_signal(&dir.join(format!("ground_truth.{ext}")), &out.ground_truth, args.format)?;

    let mut onsets = String::from("onset_sample,onset_s,peak_sample\n");
    for (o, p) in out.blink_onsets.iter().zip(&out.blink_peaks) {
        onsets.push_str(&format!("{o},{},{p}\n", *o as f64 / spec.fs));
    }
    write_bytes(&dir.join("onsets.csv"), onsets.as_bytes())?;

    let mut pairs = provenance(&cfg, Some(cfg.simulate.seed));
    pairs.extend([
        ("fs", spec.fs.to_string()),
        ("samples", out.contaminated.len().to_string()),
        ("snr_db", spec.snr_db.to_string()),
        ("alpha", out.alpha_used.to_string()),
        ("blinks", out.blink_onsets.len().to_string()),
    ]);
    write_bytes(&dir.join("simulation.txt"), key_value(&pairs).as_bytes())?;
    log::info!("wrote semi-simulated dataset to {}", dir.display());
    Ok(())
}
