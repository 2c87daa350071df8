use std::path::PathBuf;

use easr_core::metrics::{band_power_ratios, correlation, count_blinks, percentage_reduction, rrmse, BandPowers};
use easr_core::semisim::second_channel;
use easr_core::{asr_clean_multichannel, build_semisim, easr_clean, preprocess, SemiSimSpec, Signal};
use rayon::prelude::*;
use serde::Serialize;

use super::{csv_preamble, emit, json_string, key_value, provenance, ReportFormat};
use crate::config::{AlgoFlags, FileConfig};
use crate::error::CliError;
use crate::files::write_bytes;

/// Offset between the channel-1 seed and the second channel's background.
const SECOND_CHANNEL_SEED_OFFSET: u64 = 100;

/// Published single-dataset results, printed for side-by-side reading.
const REFERENCE: [(&str, f64, f64); 2] = [("E-ASR", 43.87, 0.91), ("ASR", 56.82, 0.85)];

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Inclusive integer SNR range such as `-7..2`; one row per value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "snr_db")]
    sweep_snr: Option<String>,
    /// Worker threads for a sweep. Results do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for CSV result tables and time-series dumps.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    report_format: ReportFormat,
    #[command(flatten)]
    algo: AlgoFlags,
}

#[derive(Debug, Clone, Serialize)]
struct MethodRow {
    method: &'static str,
    snr_db: f64,
    rrmse_pct: f64,
    cc: f64,
    blinks_before: usize,
    blinks_after: usize,
    reduction_pct: Option<f64>,
    time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
struct BandRow {
    snr_db: f64,
    signal: &'static str,
    #[serde(flatten)]
    bands: BandPowers,
}

#[derive(Debug, Serialize)]
struct SnrResult {
    snr_db: f64,
    alpha: f64,
    methods: Vec<MethodRow>,
    band_power: Vec<BandRow>,
    #[serde(skip)]
    series: Vec<(&'static str, Signal)>,
}

/// Parses `a..b` into every integer from `a` to `b` inclusive.
fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--sweep-snr expects an integer range like -7..2, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).map(|v| v as f64).collect())
}

fn run_one(cfg: &FileConfig, seed: u64, snr_db: f64) -> Result<SnrResult, CliError> {
    let fs = cfg.simulate.fs;
    let mut spec = SemiSimSpec::synthetic(fs, seed)?;
    spec.snr_db = snr_db;
    let ch1 = build_semisim(&spec)?;
    let ch2 = build_semisim(&second_channel(&spec, seed + SECOND_CHANNEL_SEED_OFFSET)?)?;

    let easr = easr_clean(&ch1.contaminated, &cfg.easr())?;
    let truth_filtered = preprocess(&ch1.ground_truth, &cfg.preprocess)?;
    let multi = asr_clean_multichannel(&[ch1.contaminated.clone(), ch2.contaminated], &cfg.asr)?;
    let asr_ch1 = &multi.cleaned[0];

    let before = count_blinks(&ch1.contaminated, &cfg.blink)?.count;
    let row = |method, cleaned: &Signal, truth: &Signal, time_s| -> Result<MethodRow, CliError> {
        let after = count_blinks(cleaned, &cfg.blink)?.count;
        Ok(MethodRow {
            method,
            snr_db,
            rrmse_pct: rrmse(cleaned.samples(), truth.samples())?,
            cc: correlation(cleaned.samples(), truth.samples())?,
            blinks_before: before,
            blinks_after: after,
            reduction_pct: percentage_reduction(before, after),
            time_s,
        })
    };
    // E-ASR output is band-limited, so it is scored against the filtered
    // truth; plain ASR sees the raw channels.
    let methods = vec![
        row("E-ASR", &easr.cleaned, &truth_filtered, easr.elapsed)?,
        row("ASR", asr_ch1, &ch1.ground_truth, multi.elapsed)?,
    ];
    let band = |signal, s: &Signal| -> Result<BandRow, CliError> {
        Ok(BandRow {
            snr_db,
            signal,
            bands: band_power_ratios(s)?,
        })
    };
    let band_power = vec![
        band("contaminated", &ch1.contaminated)?,
        band("E-ASR", &easr.cleaned)?,
        band("ASR", asr_ch1)?,
        band("ground truth", &ch1.ground_truth)?,
    ];
    let series = vec![
        ("contaminated", ch1.contaminated.clone()),
        ("ground_truth", ch1.ground_truth.clone()),
        ("ground_truth_filtered", truth_filtered),
        ("easr_cleaned", easr.cleaned),
        ("asr_cleaned", asr_ch1.clone()),
    ];
    Ok(SnrResult {
        snr_db,
        alpha: ch1.alpha_used,
        methods,
        band_power,
        series,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.1}"))
}

fn text_report(pairs: &[(&str, String)], results: &[SnrResult]) -> String {
    let mut t = key_value(pairs);
    t.push('\n');
    t.push_str(&format!(
        "{:<10} {:>7} {:>10} {:>6} {:>7} {:>6} {:>10} {:>8}\n",
        "method", "snr_db", "rrmse_pct", "cc", "before", "after", "reduction", "time_s"
    ));
    for r in results {
        for m in &r.methods {
            t.push_str(&format!(
                "{:<10} {:>7} {:>10.2} {:>6.3} {:>7} {:>6} {:>10} {:>8.3}\n",
                m.method,
                m.snr_db,
                m.rrmse_pct,
                m.cc,
                m.blinks_before,
                m.blinks_after,
                fmt_opt(m.reduction_pct),
                m.time_s
            ));
        }
    }
    for (name, e, c) in REFERENCE {
        t.push_str(&format!(
            "{:<10} {:>7} {e:>10.2} {c:>6.2}   (published reference)\n",
            name, "-"
        ));
    }
    for r in results {
        t.push_str(&format!(
            "\nband power ratios, snr {} dB (alpha {:.4})\n",
            r.snr_db, r.alpha
        ));
        t.push_str(&format!(
            "{:<14} {:>7} {:>7} {:>7} {:>7} {:>7}\n",
            "signal", "delta", "theta", "alpha", "beta", "gamma"
        ));
        for b in &r.band_power {
            let [d, th, a, be, g] = b.bands.as_array();
            t.push_str(&format!(
                "{:<14} {d:>7.3} {th:>7.3} {a:>7.3} {be:>7.3} {g:>7.3}\n",
                b.signal
            ));
        }
    }
    t
}

fn dump(dir: &std::path::Path, pairs: &[(&str, String)], results: &[SnrResult]) -> Result<(), CliError> {
    let mut rows = csv_preamble(pairs);
    rows.push_str("method,snr_db,rrmse_pct,cc,blinks_before,blinks_after,reduction_pct,time_s\n");
    let mut bands = csv_preamble(pairs);
    bands.push_str("snr_db,signal,delta,theta,alpha,beta,gamma\n");
    for r in results {
        for m in &r.methods {
            rows.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                m.method,
                m.snr_db,
                m.rrmse_pct,
                m.cc,
                m.blinks_before,
                m.blinks_after,
                m.reduction_pct.map_or("n/a".into(), |v| v.to_string()),
                m.time_s
            ));
        }
        for b in &r.band_power {
            let [d, th, a, be, g] = b.bands.as_array();
            bands.push_str(&format!("{},{},{d},{th},{a},{be},{g}\n", r.snr_db, b.signal));
        }
        let fs = r.series[0].1.fs();
        let mut ts = String::from("time_s");
        for (name, _) in &r.series {
            ts.push(',');
            ts.push_str(name);
        }
        ts.push('\n');
        for i in 0..r.series[0].1.len() {
            ts.push_str(&format!("{}", i as f64 / fs));
            for (_, s) in &r.series {
                ts.push_str(&format!(",{}", s.samples()[i]));
            }
            ts.push('\n');
        }
        write_bytes(&dir.join(format!("timeseries_snr{}.csv", r.snr_db)), ts.as_bytes())?;
    }
    write_bytes(&dir.join("results.csv"), rows.as_bytes())?;
    write_bytes(&dir.join("band_power.csv"), bands.as_bytes())
}

pub fn run(args: Args, mut cfg: FileConfig) -> Result<(), CliError> {
    args.algo.apply(&mut cfg);
    if let Some(s) = args.seed {
        cfg.simulate.seed = s;
    }
    if let Some(v) = args.snr_db {
        cfg.simulate.snr_db = v;
    }
    let snrs = match &args.sweep_snr {
        Some(s) => parse_sweep(s)?,
        None => vec![cfg.simulate.snr_db],
    };
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let seed = cfg.simulate.seed;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", args.jobs)))?;
    let results: Vec<SnrResult> = pool.install(|| {
        snrs.par_iter()
            .map(|&snr| run_one(&cfg, seed, snr))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let pairs = provenance(&cfg, Some(seed));
    if let Some(dir) = &args.out_dir {
        dump(dir, &pairs, &results)?;
    }
    let text = match args.report_format {
        ReportFormat::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                version: &'a str,
                seed: u64,
                config: &'a FileConfig,
                results: &'a [SnrResult],
                reference: Vec<MethodRef>,
            }
            #[derive(Serialize)]
            struct MethodRef {
                method: &'static str,
                rrmse_pct: f64,
                cc: f64,
            }
            json_string(&Doc {
                version: env!("CARGO_PKG_VERSION"),
                seed,
                config: &cfg,
                results: &results,
                reference: REFERENCE
                    .iter()
                    .map(|&(method, rrmse_pct, cc)| MethodRef { method, rrmse_pct, cc })
                    .collect(),
            })?
        }
        ReportFormat::Text | ReportFormat::Csv => text_report(&pairs, &results),
    };
    emit(None, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        assert_eq!(parse_sweep("-7..2").unwrap().len(), 10);
        assert_eq!(parse_sweep("0..0").unwrap(), vec![0.0]);
        assert!(parse_sweep("2..-7").is_err());
        assert!(parse_sweep("a..b").is_err());
        assert!(parse_sweep("3").is_err());
    }
}
