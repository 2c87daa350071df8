//! `easr`: clean single-channel EEG recordings, build semi-simulated
//! datasets, evaluate results and run the reproduction benchmark.

mod commands;
mod config;
mod error;
mod files;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{bench, clean, evaluate, simulate};

#[derive(Debug, Parser)]
#[command(name = "easr", version, about = "Single-channel EEG blink removal by embedded ASR")]
struct Cli {
    /// TOML config file; defaults to $EASR_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean one channel of a recording.
    Clean(clean::Args),
    /// Write a semi-simulated contaminated/ground-truth pair.
    Simulate(simulate::Args),
    /// Compute metrics for a cleaned signal.
    Evaluate(evaluate::Args),
    /// Run E-ASR and two-channel ASR on the synthetic benchmark.
    Bench(bench::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = config::FileConfig::load(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Clean(a) => clean::run(a, cfg),
        Command::Simulate(a) => simulate::run(a, cfg),
        Command::Evaluate(a) => evaluate::run(a, cfg),
        Command::Bench(a) => bench::run(a, cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("easr: {e}");
            e.exit_code()
        }
    }
}
