use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaussthermo_cli::{execute, Command, ConfigArgs};

/// Non-equilibrium two-mode Gaussian thermometer scans. Output is CSV;
/// diagnostics go to standard error and are controlled by GAUSSTHERMO_LOG.
#[derive(Parser)]
#[command(name = "gaussthermo", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Initial Riemannian speed of random states vs ν̃₋, with the GMEMS lower bound
    #[command(allow_negative_numbers = true)]
    SpeedScan(ConfigArgs),
    /// Fisher information for the bath occupation and temperature over time
    #[command(allow_negative_numbers = true)]
    QfiScan(ConfigArgs),
    /// Stationary covariance matrix and its invariants
    #[command(allow_negative_numbers = true)]
    SteadyState(ConfigArgs),
    /// Covariance matrix trajectory from an initial state
    #[command(allow_negative_numbers = true)]
    Propagate(ConfigArgs),
    /// Random states drawn through their purity invariants
    #[command(allow_negative_numbers = true)]
    SampleStates(ConfigArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GAUSSTHERMO_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (cmd, args) = match cli.command {
        Sub::SpeedScan(a) => (Command::SpeedScan, a),
        Sub::QfiScan(a) => (Command::QfiScan, a),
        Sub::SteadyState(a) => (Command::SteadyState, a),
        Sub::Propagate(a) => (Command::Propagate, a),
        Sub::SampleStates(a) => (Command::SampleStates, a),
    };
    match args.resolve().and_then(|cfg| execute(cmd, &cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gaussthermo {}: {e}", cmd.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
