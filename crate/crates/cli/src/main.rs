//! Batch front end: identity suites, static torsion solves, wave runs and
//! action evaluation, with reproducible file outputs.

mod config;
mod runs;

use anyhow::Result;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "spintor", version, about = "Lattice torsion-dynamics runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Flat key = value TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Repeatable key=value configuration overrides.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the cross-module identity battery and write a JSON report.
    Check(CommonArgs),
    /// Minimize the static torsion functional with a spinor source.
    Solve(CommonArgs),
    /// Integrate the linearized torsion wave equation.
    Evolve(CommonArgs),
    /// Evaluate the action breakdown for the configured fields.
    Action(CommonArgs),
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    let (args, f): (
        &CommonArgs,
        fn(&config::RunConfig, &std::path::Path) -> Result<i32>,
    ) = match &cli.command {
        Command::Check(a) => (a, runs::cmd_check),
        Command::Solve(a) => (a, runs::cmd_solve),
        Command::Evolve(a) => (a, runs::cmd_evolve),
        Command::Action(a) => (a, runs::cmd_action),
    };
    let cfg = config::RunConfig::load(args.config.as_deref(), &args.overrides, args.seed)?;
    f(&cfg, &args.out)
}
