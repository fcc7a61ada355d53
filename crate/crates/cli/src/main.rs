//! `qpm`: poling design, purity evaluation and length sweeps from a config
//! file.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, Overrides};

pub const TOOL: &str = "qpm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "qpm", version, about = "Poling design and photon purity for quasi-phase-matched crystals")]
struct Cli {
    /// TOML run configuration; defaults reproduce the 2 mm KTP case.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// RNG seed; overrides `seed` in the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores for `sweep`, 1 otherwise).
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    parallel: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Design a poling pattern; writes poling, metadata, amplitude and PMF files.
    Design,
    /// Evaluate purity with an optimized (or fixed) pump bandwidth.
    Purity {
        /// Evaluate this poling file instead of designing one.
        #[arg(long, value_name = "PATH")]
        poling: Option<PathBuf>,
    },
    /// Purity versus crystal length for the configured algorithm.
    Sweep,
    /// Write a poling file (designed, or converted from `--poling`) in a chosen format.
    Export {
        #[arg(long, value_name = "PATH")]
        poling: Option<PathBuf>,
        /// csv-boundaries or csv-widths; overrides `output.format`.
        #[arg(long, value_name = "FORMAT")]
        format: Option<String>,
    },
    /// Group-velocity diagnostics and coherence length of the process.
    GvmReport,
}

/// A run that completed but produced failed rows.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct PartialFailure(pub String);

fn classify(err: &anyhow::Error) -> (u8, &'static str, Option<String>) {
    for cause in err.chain() {
        if let Some(c) = cause.downcast_ref::<ConfigError>() {
            return (2, "config", Some(c.field.clone()));
        }
        if let Some(e) = cause.downcast_ref::<qpm_core::Error>() {
            use qpm_core::Error::*;
            return match e {
                InvalidParameter { field, .. } => (2, "config", Some((*field).to_string())),
                OutOfWindow { .. } | MissingAxis(_) | PhaseMatched(_) | PolingFormat { .. } | DispersionData(_) => {
                    (2, "config", None)
                }
                _ => (1, "runtime", None),
            };
        }
        if cause.downcast_ref::<PartialFailure>().is_some() {
            return (1, "partial", None);
        }
    }
    (1, "runtime", None)
}

fn error_line(err: &anyhow::Error) -> (u8, String) {
    let (code, kind, field) = classify(err);
    let message = err
        .chain()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(": ");
    let line = serde_json::json!({
        "error": { "exit_code": code, "kind": kind, "field": field, "message": message }
    });
    (code, line.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let detail = e.to_string();
            let message = detail.lines().next().unwrap_or_default().trim_start_matches("error: ");
            let line = serde_json::json!({
                "error": { "exit_code": 2, "kind": "usage", "field": null, "message": message }
            });
            eprintln!("{line}");
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
    };
    let default_threads = match cli.command {
        Command::Sweep => std::thread::available_parallelism().map_or(1, |n| n.get()),
        _ => 1,
    };
    let threads = cli.parallel.map_or(default_threads, usize::from);
    let result = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(anyhow::Error::from)
        .and_then(|pool| {
            pool.install(|| -> anyhow::Result<()> {
                let mut cfg = config::load(cli.config.as_deref(), &overrides)?;
                match cli.command {
                    Command::Design => commands::design(&cfg),
                    Command::Purity { poling } => commands::purity(&cfg, poling.as_deref()),
                    Command::Sweep => commands::sweep(&cfg),
                    Command::Export { poling, format } => commands::export(&mut cfg, poling.as_deref(), format.as_deref()),
                    Command::GvmReport => commands::gvm_report(&cfg),
                }
            })
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, line) = error_line(&e);
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}
