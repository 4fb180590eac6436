mod cli;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use commands::{Failure, Outcome, Session};
use irs_core::montecarlo::Engine;
use irs_core::scenario::ScenarioConfig;

fn run(cli: Cli) -> Outcome {
    if let Command::Design(args) = &cli.command {
        return commands::design(args);
    }
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::from_json_file(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Failure::usage("--workers must be positive"));
    }
    let session = Session {
        config,
        engine: Engine::new(workers)?,
        out_dir: &cli.out_dir,
    };
    match &cli.command {
        Command::SweepSe(args) => commands::sweep_se(&session, args),
        Command::Outage(args) => commands::outage(&session, args),
        Command::Prelog(args) => commands::prelog(&session, args),
        Command::Validate(args) => commands::validate(&session, args),
        Command::Design(_) => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 for --help.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("irs-sim: {f}");
            ExitCode::from(f.code)
        }
    }
}
