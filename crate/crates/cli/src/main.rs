//! `ccrenorm`: runs one experiment and writes `<out>.csv` plus
//! `<out>.meta.json`.
//!
//! Exit codes: 0 on success, 2 when the solver stopped early (certified rows
//! are still written), 1 on configuration or I/O errors (nothing written).

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use ccrenorm::{par, R128, R256};
use clap::Parser;

use commands::{meta, resolve, run, Command};
use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "ccrenorm",
    version,
    about = "Renormalization experiments for critical circle maps"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// JSON file with RunConfig fields, or a previous run's .meta.json.
    /// Flags override its values.
    #[arg(long, value_name = "FILE.json")]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: RunConfig,
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    let base = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let cmd = cli.command;
    let cfg = resolve(cmd, cli.flags.over(base))?;

    let start = Instant::now();
    let outcome = par::with_workers(cfg.workers, || match cfg.bits {
        Some(53) => run::<f64>(cmd, &cfg),
        Some(256) => run::<R256>(cmd, &cfg),
        _ => run::<R128>(cmd, &cfg),
    })?;
    let wall = start.elapsed().as_secs_f64();

    let stem = cfg.out.clone().unwrap_or_else(|| cmd.name().into());
    let (csv_path, meta_path) = report::paths(&stem);
    report::write_csv(&csv_path, &outcome)?;
    let mut sidecar = meta(cmd, &cfg, &outcome);
    sidecar["wall_time_s"] = report::json_f64(Some(wall));
    report::write_meta(&meta_path, &sidecar)?;

    println!("{}", csv_path.display());
    println!("{}", meta_path.display());
    match &outcome.halted {
        None => Ok(ExitCode::SUCCESS),
        Some(e) => {
            eprintln!(
                "ccrenorm {}: stopped after {} certified levels: {e}",
                cmd.name(),
                outcome.certified_depth
            );
            Ok(ExitCode::from(2))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ccrenorm: {e}");
            ExitCode::from(1)
        }
    }
}
