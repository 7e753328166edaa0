use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod run;

use config::{Command, Overrides};
use run::Failure;

/// Phase-space evolution and diagnostics for spin systems.
#[derive(Debug, Parser)]
#[command(name = "spinphase", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides `outputs.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,

    /// Acceptance tolerance (overrides `compare.tolerance` or `scan.slope_tolerance`).
    #[arg(long, global = true, value_name = "X")]
    tolerance: Option<f64>,

    /// Seed for random initial states and operators.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Integrate the phase-space equation of motion and write a trajectory.
    Evolve,
    /// Run phase-space and density-matrix evolution side by side.
    Compare,
    /// Measure quantum/classical generator deviation across spins.
    LimitScan,
    /// Tabulate the kernel on a sphere grid.
    Kernel,
    /// Tabulate the symbol of an operator on a sphere grid.
    Symbol,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Evolve => Command::Evolve,
            Sub::Compare => Command::Compare,
            Sub::LimitScan => Command::LimitScan,
            Sub::Kernel => Command::Kernel,
            Sub::Symbol => Command::Symbol,
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (src, dir) = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
            (text, path.parent().unwrap_or(Path::new(".")).to_path_buf())
        }
        None => (String::new(), PathBuf::from(".")),
    };
    let overrides = Overrides {
        out: cli.out,
        tolerance: cli.tolerance,
        seed: cli.seed,
    };
    let cfg = config::parse(&src, cli.command.into(), &overrides).map_err(|e| Failure::Validation(e.to_string()))?;
    run::run(cfg, &dir)
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
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
