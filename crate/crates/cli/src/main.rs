//! airlink — per-channel SNR, mutual information, and achievable
//! information rates for wideband WDM links under EDFA or backward-pumped
//! Raman amplification.
//!
//! Commands:
//! - `eta` — per-channel NL distortion coefficients and SNR columns
//! - `snr` — SNR table at one mode's optimized uniform launch power
//! - `air` — AIR summary and per-channel MI for mode/format/shaping combos
//! - `sweep` — AIR vs distance with per-distance re-optimization
//! - `record-check` — C+L EDFA scenario vs a reference record throughput
//! - `cache` — inspect or clear the spectrum cache
//!
//! Exit codes: 0 success, 1 invalid configuration or usage, 2 numerical
//! failure (quadrature or kernel accuracy).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;
mod pipeline;

use pipeline::SourceOpts;

#[derive(Parser)]
#[command(name = "airlink", version, about)]
struct Cli {
    /// Output directory for CSVs, plot scripts, and the manifest log.
    #[arg(long, global = true, default_value = "airlink-out", value_name = "DIR")]
    out: PathBuf,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-channel NL distortion coefficients eta(k) plus EDC/FF-NLC SNR.
    Eta {
        #[command(flatten)]
        src: SourceOpts,
    },
    /// Per-channel SNR table at one mode's optimized uniform power.
    Snr {
        #[command(flatten)]
        src: SourceOpts,
        /// Mode whose capacity sets the launch power.
        #[arg(long, default_value = "ffnlc", value_parser = ["edc", "ffnlc"])]
        mode: String,
    },
    /// Achievable information rates for mode/format/shaping combinations.
    Air {
        #[command(flatten)]
        src: SourceOpts,
        /// Compensation modes to evaluate.
        #[arg(long, value_delimiter = ',', default_values_t = vec!["edc".to_string(), "ffnlc".to_string()])]
        modes: Vec<String>,
        /// Constellation orders (square QAM).
        #[arg(long, value_delimiter = ',', default_values_t = vec![64usize, 256, 1024])]
        formats: Vec<usize>,
        /// Shaping variants.
        #[arg(long, value_delimiter = ',', default_values_t = vec!["uniform".to_string(), "mb".to_string()])]
        shaping: Vec<String>,
    },
    /// AIR vs distance; distances must be whole multiples of the span length.
    Sweep {
        #[command(flatten)]
        src: SourceOpts,
        /// Distances in km (comma-separated).
        #[arg(long, value_delimiter = ',', required = true)]
        distances: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec!["ffnlc".to_string()])]
        modes: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![256usize, 1024])]
        formats: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec!["mb".to_string()])]
        shaping: Vec<String>,
        /// Relative AIR difference below which two formats count as crossed.
        #[arg(long, default_value_t = 0.005)]
        crossover_tol: f64,
    },
    /// Theoretical AIR for the C+L EDFA record scenario vs the record rate.
    RecordCheck {
        /// Channel count (odd; 959 x 10 GHz spans 9.59 THz).
        #[arg(long, default_value_t = 959)]
        channels: usize,
        /// Span count override (default: whole 80 km spans within 9100 km).
        #[arg(long)]
        spans: Option<usize>,
        /// Reference throughput, Tb/s.
        #[arg(long, default_value_t = commands::RECORD_RATE_TBPS)]
        record_tbps: f64,
        #[arg(long, value_name = "N")]
        gh_order: Option<usize>,
        #[arg(long = "tol", value_name = "X")]
        sf_rel_tol: Option<f64>,
        #[arg(long)]
        full_spectrum: bool,
    },
    /// Inspect or clear the spectrum cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
pub enum CacheAction {
    /// List cache entries.
    Status,
    /// Remove cache entries.
    Clear {
        #[arg(long)]
        all: bool,
        /// Config hash (hex) of a single entry to remove.
        #[arg(long)]
        hash: Option<String>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match &cli.command {
        Command::Eta { src } => commands::cmd_eta(src, &cli.out),
        Command::Snr { src, mode } => commands::cmd_snr(src, mode, &cli.out),
        Command::Air {
            src,
            modes,
            formats,
            shaping,
        } => commands::cmd_air(src, modes, formats, shaping, &cli.out),
        Command::Sweep {
            src,
            distances,
            modes,
            formats,
            shaping,
            crossover_tol,
        } => commands::cmd_sweep(src, distances, modes, formats, shaping, *crossover_tol, &cli.out),
        Command::RecordCheck {
            channels,
            spans,
            record_tbps,
            gh_order,
            sf_rel_tol,
            full_spectrum,
        } => commands::cmd_record_check(
            *channels,
            *spans,
            *record_tbps,
            *gh_order,
            *sf_rel_tol,
            *full_spectrum,
            &cli.out,
        ),
        Command::Cache { action } => commands::cmd_cache(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let numerical = err.downcast_ref::<airlink_core::Error>().is_some_and(|e| {
                matches!(
                    e,
                    airlink_core::Error::Quadrature { .. }
                        | airlink_core::Error::KernelAccuracy { .. }
                )
            });
            if numerical {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
