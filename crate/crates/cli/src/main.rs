//! Command-line runner for the underwater CV-QKD channel simulator.
//!
//! Subcommands are constrained views over the same sweep engine:
//!
//! - `attenuation`     Beer-Lambert factors only (turbulence off)
//! - `turbulence-pdf`  turbulence-only ensemble statistics
//! - `transmittance`   combined channel transmittance
//! - `keyrate`         full key-rate sweep over the photon-count list
//!
//! Results go to a CSV file; progress and wall time go to stderr. The
//! `UOWC_DATA_DIR` environment variable switches the spectral and profile
//! tables to an external directory.

// Negated float comparisons reject NaN; `x < 0.0` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod sweep;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use config::{load_config, SimulationConfig};
use sweep::run_sweep;

pub const DATA_DIR_ENV: &str = "UOWC_DATA_DIR";

#[derive(Parser)]
#[command(
    name = "uowc",
    about = "Underwater optical channel and CV-QKD key-rate sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Beer-Lambert attenuation sweep (turbulence disabled, one sample).
    Attenuation(CommonOpts),
    /// Turbulence-only transmittance statistics (attenuation disabled).
    #[command(name = "turbulence-pdf")]
    TurbulencePdf(CommonOpts),
    /// Combined attenuation and turbulence transmittance sweep.
    Transmittance(CommonOpts),
    /// Secret-key-rate sweep over the configured photon-count list.
    Keyrate(CommonOpts),
}

#[derive(Args)]
struct CommonOpts {
    /// Config file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo sample count override.
    #[arg(long)]
    samples: Option<usize>,
    /// Output CSV path override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread count (0 = library default).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (opts, view) = match &cli.command {
        Command::Attenuation(opts) => (opts, View::Attenuation),
        Command::TurbulencePdf(opts) => (opts, View::TurbulencePdf),
        Command::Transmittance(opts) => (opts, View::Transmittance),
        Command::Keyrate(opts) => (opts, View::Keyrate),
    };

    if let Some(threads) = opts.threads {
        if threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .context("configuring the worker pool")?;
        }
    }

    let data_dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
    let mut config = load_config(opts.config.as_deref(), data_dir.as_deref())
        .context("loading configuration")?;
    apply_view(&mut config, view);
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if let Some(samples) = opts.samples {
        anyhow::ensure!(samples > 0, "--samples must be at least 1");
        config.samples = samples;
    }
    if let Some(out) = &opts.out {
        config.output = out.clone();
    }

    let mut stderr = std::io::stderr();
    let result = run_sweep(&config, Some(&mut stderr))?;

    let file = File::create(&config.output)
        .with_context(|| format!("creating {}", config.output.display()))?;
    let mut writer = BufWriter::new(file);
    result
        .write_csv(&mut writer)
        .and_then(|()| writer.flush())
        .with_context(|| format!("writing {}", config.output.display()))?;
    eprintln!(
        "wrote {} rows to {}",
        result.rows.len(),
        config.output.display()
    );
    Ok(())
}

#[derive(Clone, Copy)]
enum View {
    Attenuation,
    TurbulencePdf,
    Transmittance,
    Keyrate,
}

/// Applies the subcommand's constraints on top of the loaded config.
fn apply_view(config: &mut SimulationConfig, view: View) {
    match view {
        View::Attenuation => {
            config.turbulence_enabled = false;
            config.attenuation_enabled = true;
            config.samples = 1;
            config.qkd.photon_counts = vec![0];
        }
        View::TurbulencePdf => {
            config.turbulence_enabled = true;
            config.attenuation_enabled = false;
            config.qkd.photon_counts = vec![0];
        }
        View::Transmittance => {
            config.qkd.photon_counts = vec![0];
        }
        View::Keyrate => {}
    }
}
