//! Command-line driver: parses the layered config, runs one experiment and
//! writes its tables plus a JSON manifest.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{env_layer, read_file_layer, resolve, RunConfig};
use crate::output::{write_manifest, Manifest, FORMAT_VERSION};

#[derive(Debug, Parser)]
#[command(name = "dtc", version, about = "Dissipative discrete time crystal simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stroboscopic magnetization, negativity, purity and excitations.
    Evolve(CommonArgs),
    /// Eigenvalues of the two-period effective Liouvillian.
    Spectrum(CommonArgs),
    /// Disorder-averaged Liouvillian gap.
    GapSweep(SweepArgs),
    /// Two-site effective coupling and gap.
    Twosite(CommonArgs),
    /// Invariant suite.
    Validate(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Evolve(_) => "evolve",
            Command::Spectrum(_) => "spectrum",
            Command::GapSweep(_) => "gap-sweep",
            Command::Twosite(_) => "twosite",
            Command::Validate(_) => "validate",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Evolve(a) | Command::Spectrum(a) | Command::Twosite(a) | Command::Validate(a) => a,
            Command::GapSweep(s) => &s.common,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Use the published ensemble size of 200 realizations per point.
    #[arg(long, conflicts_with = "n_realizations")]
    pub paper_realizations: bool,
}

/// Flag overrides; one per config key.
#[derive(Debug, Default, Args, Serialize)]
pub struct Flags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j0_t_over_2pi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long, alias = "gammaT", allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_over_t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_over_j0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_periods: Option<usize>,
    /// Comma-separated `W / J0` grid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_over_j0_values: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_realizations: Option<usize>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn flag_layer(command: &Command) -> Result<Map<String, Value>> {
    let mut map = match serde_json::to_value(&command.common().flags)? {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    if let Command::GapSweep(s) = command {
        if s.paper_realizations {
            map.insert("n_realizations".into(), dtc_core::experiments::PAPER_REALIZATIONS.into());
        }
    }
    Ok(map)
}

/// Resolved config of a parsed command line: file, then environment, then
/// flags. Command-specific grids are filled in so the manifest records them.
pub fn resolve_config(command: &Command, env: impl IntoIterator<Item = (String, String)>) -> Result<RunConfig> {
    let file = match &command.common().config {
        Some(path) => read_file_layer(path)?,
        None => Map::new(),
    };
    let mut cfg = resolve([file, env_layer(env), flag_layer(command)?])?;
    if cfg.w_over_j0_values.is_none() {
        match command {
            Command::GapSweep(_) => cfg.w_over_j0_values = Some(commands::default_sweep_grid()),
            Command::Twosite(_) => cfg.w_over_j0_values = Some(commands::default_twosite_grid()),
            _ => {}
        }
    }
    Ok(cfg)
}

/// Runs a parsed command and writes its manifest; returns the manifest path.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output).with_context(|| format!("creating {}", cfg.output.display()))?;
    let start = Instant::now();
    let outcome = match command {
        Command::Evolve(_) => commands::evolve(cfg),
        Command::Spectrum(_) => commands::spectrum(cfg),
        Command::GapSweep(_) => commands::gap_sweep(cfg),
        Command::Twosite(_) => commands::twosite(cfg),
        Command::Validate(_) => commands::validate(cfg),
    }?;
    let manifest = Manifest {
        tool: "dtc".into(),
        version: dtc_core::VERSION.into(),
        format_version: FORMAT_VERSION,
        command: command.name().into(),
        config: cfg.clone(),
        seeds: outcome.seeds,
        outputs: outcome.outputs,
        results: outcome.results,
        wall_time_s: start.elapsed().as_secs_f64(),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    let path = write_manifest(&cfg.output, &manifest)?;
    if let Some(msg) = outcome.failure {
        bail!("{}: {msg}", command.name());
    }
    Ok(path)
}

/// Entry point shared by the binary and the tests.
pub fn run(args: impl IntoIterator<Item = String>, env: impl IntoIterator<Item = (String, String)>) -> Result<PathBuf> {
    let cli = Cli::try_parse_from(args)?;
    let cfg = resolve_config(&cli.command, env)?;
    execute(&cli.command, &cfg)
}
