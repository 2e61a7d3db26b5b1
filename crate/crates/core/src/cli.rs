//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for an invalid configuration or command line,
//! 3 for a numerical or hypothesis failure. On failure the files written so far
//! keep their `.partial` suffix.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use crate::output::OutputSet;
use crate::parallel::WORKERS_ENV;
use crate::runner::{default_config, run, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "cartan", version, about = "Brownian motion on Cartan–Hadamard surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Ensemble of polar SDE paths: stop reasons and angular statistics.
    Simulate,
    /// Coupled paths on a surface and its radial comparison surface.
    Coupled,
    /// Monte Carlo harmonic extension of boundary data at infinity.
    Dirichlet,
    /// Transience classifier against simulated hitting frequencies.
    Dichotomy,
    /// Deterministic estimates: scale function, energies, expected angular variation.
    Estimates,
    /// Built-in oracle checks.
    Validate,
}

impl Command {
    pub fn kind(self) -> ExperimentKind {
        match self {
            Command::Simulate => ExperimentKind::Simulate,
            Command::Coupled => ExperimentKind::Coupled,
            Command::Dirichlet => ExperimentKind::Dirichlet,
            Command::Dichotomy => ExperimentKind::Dichotomy,
            Command::Estimates => ExperimentKind::Estimates,
            Command::Validate => ExperimentKind::Validate,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML experiment file; built-in defaults are used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `mc.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Output directory (default `out/<subcommand>`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Also write per-path CSVs.
    #[arg(long, global = true)]
    pub paths: bool,
}

/// Resolves the effective configuration: file or defaults, then flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let kind = cli.command.kind();
    let mut cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => default_config(kind),
    };
    cfg.kind = kind;
    if let Some(seed) = cli.common.seed {
        cfg.mc.seed = seed;
    }
    if let Some(w) = cli.common.workers {
        cfg.mc.workers = Some(w);
    }
    if cli.common.plot {
        cfg.output.plot = true;
    }
    if cli.common.paths {
        cfg.output.paths_csv = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    let dir = cli
        .common
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.kind.as_str()));
    let mut out = OutputSet::create(&dir)?;
    let opts = RunOptions {
        plot: cfg.output.plot,
        paths: cfg.output.paths_csv,
    };
    let lines = run(&cfg, opts, &mut out)?;
    out.commit()?;
    for l in lines {
        println!("{l}");
    }
    println!("wrote {} (config {})", dir.display(), &cfg.config_hash()[..12]);
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                Error::Config { key, .. } => eprintln!("error: invalid configuration key `{key}`: {e}"),
                _ => eprintln!("error: {e}"),
            }
            e.exit_code()
        }
    }
}
