//! Command-line front end.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "drsc", version, about = "Degenerate Raman sideband cooling simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_heating: bool,
    /// Add Raman dark preparation columns to cooling histories.
    #[arg(long, global = true)]
    pub rdp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transfer matrices W(t) as dense CSV plus a JSON manifest.
    TransferMatrix {
        /// Pulse lengths in T_f, comma separated; overrides the config.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Cooling run with per-pulse distributions and histories.
    Cool,
    /// Optimal single-pulse suppression over initial temperatures.
    Table1,
    /// Optical-pumping Markov chain and recoil heating estimates.
    Pumping,
    /// Sideband-ratio thermometry of the initial thermal state.
    Probe,
    /// Global pulse-sequence optimization.
    Optimize,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::TransferMatrix { .. } => "transfer-matrix",
            Command::Cool => "cool",
            Command::Table1 => "table1",
            Command::Pumping => "pumping",
            Command::Probe => "probe",
            Command::Optimize => "optimize",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Loads the config file and applies environment and flag overrides, in
/// that order of increasing precedence.
pub fn resolve_config(cli: &Cli, env: impl Fn(&str) -> Option<String>) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(dir) = env("DRSC_OUT_DIR") {
        cfg.output.dir = PathBuf::from(dir);
    }
    if let Some(seed) = env("DRSC_SEED") {
        cfg.seed = seed.trim().parse().map_err(|_| CliError::Config(format!("DRSC_SEED={seed} is not an integer")))?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if cli.no_heating {
        cfg.heating.enabled = false;
    }
    if cli.rdp {
        cfg.rdp.enabled = true;
    }
    if let Command::TransferMatrix { times: Some(t) } = &cli.command {
        cfg.transfer.times = t.clone();
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

/// Runs one subcommand and writes its files; returns the written names.
pub fn run(cli: &Cli, env: impl Fn(&str) -> Option<String>) -> Result<Vec<String>, CliError> {
    let cfg = resolve_config(cli, env)?;
    let outputs = commands::execute(&cli.command, &cfg)?;
    outputs.commit(&cfg.output.dir)?;
    Ok(outputs.names().into_iter().map(String::from).collect())
}
