//! `solver`: runs the heat-equation experiments and writes CSV tables.

mod commands;
mod config;
mod csv;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "solver", version, about = "Heat equation with incompatible data: penalty, corrector and direct boundary treatments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// `key = value` configuration file
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Penalty parameter ε
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Coarse cells per direction (radial cells on the disk)
    #[arg(long, global = true)]
    nx: Option<usize>,

    /// Coarse time steps
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Boundary mode: direct, penalty, corrector0, corrector1, corrector2
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Output directory (overrides SOLVER_OUT_DIR and the config)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Log progress to stderr
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Penalty ODE against its boundary-layer expansion, with remainder norms
    BoundaryLayer,
    /// Square domain: direct vs penalty, error curves, sections, rate fits
    Square,
    /// Unit disk: direct vs penalty, error curves, sections, ε sweep, rate fits
    Disk,
    /// Interval: direct, penalty and correctors, peak errors, ε sweep
    Oned,
    /// ε sweep for the experiment named by the `experiment` key
    SweepEpsilon,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let overrides = [
        ("epsilon", cli.epsilon.map(|v| v.to_string())),
        ("nx", cli.nx.map(|v| v.to_string())),
        ("steps", cli.steps.map(|v| v.to_string())),
        ("mode", cli.mode.clone()),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            cfg.set(key, &value).map_err(|e| CliError::Config(format!("--{e}")))?;
        }
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = load_config(cli)?;
    let env = std::env::var("SOLVER_OUT_DIR").ok();
    let dir = cfg.out_dir(cli.out.as_deref(), env.as_deref());
    match cli.command {
        Command::BoundaryLayer => commands::boundary_layer(&cfg, &dir),
        Command::Square => commands::square(&cfg, &dir),
        Command::Disk => commands::disk(&cfg, &dir),
        Command::Oned => commands::oned(&cfg, &dir),
        Command::SweepEpsilon => commands::sweep_epsilon(&cfg, &dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.kind().as_str().map_or_else(|| e.to_string(), str::to_string);
            eprintln!("error: usage: {}", message.lines().next().unwrap_or_default());
            eprint!("{}", e.render());
            return ExitCode::from(2);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(e.exit_code())
        }
    }
}
