//! Command-line front end: scenario runs, snapshot transforms, Casimir
//! diagnostics and invariant batteries.

mod catalog;
mod config;
mod diagnose;
mod error;
mod invariants;
mod scenario;
mod transform;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ScenarioConfig;
use crate::error::{exit, CliError, Result};
use crate::invariants::Suite;
use crate::transform::Representation;

#[derive(Debug, Parser)]
#[command(
    name = "geodens",
    version,
    about = "Geometric hydrodynamics on periodic domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write diagnostics.csv and snapshots.
    Run {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Convert a snapshot between (rho, theta) and psi.
    Transform {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum)]
        to: Representation,
        #[arg(long)]
        hbar: f64,
    },
    /// Evaluate every applicable Casimir of the given snapshots.
    Diagnose {
        #[arg(required = true)]
        snapshots: Vec<PathBuf>,
    },
    /// Run a battery of invariant checks and print a CSV report.
    TestInvariants {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let config = ScenarioConfig::load(&config)?;
            let result = scenario::run(&config, &out)?;
            eprintln!(
                "{} steps, {} snapshots, diagnostics in {}",
                result.steps,
                result.snapshots.len(),
                result.diagnostics.display()
            );
            Ok(())
        }
        Command::Transform {
            input,
            output,
            to,
            hbar,
        } => transform::transform(&input, &output, to, hbar),
        Command::Diagnose { snapshots } => diagnose::diagnose(&snapshots, io::stdout().lock()),
        Command::TestInvariants {
            suite,
            seed,
            trials,
        } => {
            let checks = invariants::run_suite(suite, seed, trials)?;
            invariants::write_report(&checks, io::stdout().lock())?;
            match checks.iter().filter(|c| !c.passed()).count() {
                0 => Ok(()),
                n => Err(CliError::ChecksFailed(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
