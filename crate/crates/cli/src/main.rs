//! `fontan`: batch runs of the lumped and distributed circulation models.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fontan_core::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "fontan", version, about = "Single-ventricle circulation models: lumped ODE and distributed PDE runs")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; created if missing.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Dotted config key set to a JSON value, e.g. `params.Rp=4.2`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Fixed number of cycles for the engine of this command.
    #[arg(long)]
    cycles: Option<usize>,
    /// Periodicity tolerance for the engine of this command.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Lumped model to a periodic orbit.
    OdeRun,
    /// Cardiac output over an Rp grid.
    OdeSweep,
    /// Distributed model to a periodic state.
    PdeRun,
    /// Distributed run plus analysis reports.
    Analyze,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Io { .. } | Error::Parse { .. } => 2,
        Error::NonConvergence { .. } | Error::NewtonFailure { .. } | Error::StepSizeUnderflow { .. } => 3,
        Error::NonphysicalState { .. } | Error::DegenerateConductivity { .. } | Error::InfeasibleBlend { .. } => 4,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<()> {
    if cli.out.exists() && !cli.out.is_dir() {
        return Err(Error::InvalidInput(format!("{} is not a directory", cli.out.display())));
    }
    let mut overrides = cli
        .overrides
        .iter()
        .map(|s| config::parse_override(s))
        .collect::<Result<Vec<_>>>()?;
    let section = match cli.command {
        Command::OdeRun | Command::OdeSweep => "ode",
        Command::PdeRun | Command::Analyze => "pde",
    };
    if let Some(n) = cli.cycles {
        overrides.push((format!("{section}.cycles"), json!(n)));
    }
    if let Some(t) = cli.tol {
        overrides.push((format!("{section}.tol"), json!(t)));
    }
    let loaded = config::load(cli.config.as_deref(), &overrides)?;
    let set = match cli.command {
        Command::OdeRun => commands::ode_run(&loaded)?,
        Command::OdeSweep => commands::ode_sweep(&loaded)?,
        Command::PdeRun => commands::pde_run(&loaded)?,
        Command::Analyze => commands::analyze(&loaded)?,
    };
    let manifest = set.write_all(&cli.out)?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, f.path);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fontan: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
