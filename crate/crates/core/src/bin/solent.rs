//! Command-line front end: `solent <soliton|propagate|enmap|sweep> --config <path> [--set key=value ...]`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use soliton_entanglement::experiment::{self, Mode, RunConfig};

#[derive(Parser)]
#[command(version, about = "Gaussian quantum fluctuations of discrete solitons in Kerr waveguide arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration key, e.g. `--set quantum.L=0.02` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a stationary soliton and its linear stability.
    Soliton(RunArgs),
    /// Propagate the Gaussian moments and report E_N, Err and total power.
    Propagate(RunArgs),
    /// Pairwise E_N map at the most entangled distance.
    Enmap(RunArgs),
    /// Max E_N over an (L, gamma) grid.
    Sweep(RunArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Soliton(a) => (Mode::Soliton, a),
        Command::Propagate(a) => (Mode::Propagate, a),
        Command::Enmap(a) => (Mode::Enmap, a),
        Command::Sweep(a) => (Mode::Sweep, a),
    };
    let mode_name = serde_json::to_value(mode).expect("mode serializes");
    let mut overrides = args.overrides;
    overrides.push(format!("experiment.mode={}", mode_name.as_str().expect("string")));

    let config = match RunConfig::load(&args.config, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", e.document());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match experiment::run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            experiment::write_error(&config, &e);
            eprintln!("{}", e.document());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
