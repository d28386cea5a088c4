use std::process::ExitCode;

use clap::Parser;
use mobility_cli::cli::{Cli, Command};
use mobility_cli::config::PipelineConfig;
use mobility_cli::error::{CliError, Result};
use mobility_cli::pipeline::{self, run_pool};
use mobility_cli::synth;
use mobility_core::geo::RegionLevel;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn print_json(value: &impl serde::Serialize) {
    match serde_json::to_string_pretty(value) {
        Ok(text) => println!("{text}"),
        Err(err) => eprintln!("warning: cannot render summary: {err}"),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = PipelineConfig::load(&cli.config)?;
    if let Some(threads) = cli.threads {
        config.analysis.threads = threads;
    }
    if let Some(seed) = cli.seed {
        config.synth.seed = seed;
    }
    if let Some(level) = cli.level {
        config.analysis.levels = vec![RegionLevel::from(level).as_str().to_string()];
    }
    let levels = config.levels()?;
    let first_level = *levels
        .first()
        .ok_or_else(|| CliError::config("analysis.levels is empty"))?;
    let threads = config.analysis.threads;

    match cli.command {
        Command::Ingest => {
            let outcome = run_pool(threads, || pipeline::ingest::run(&config))??;
            print_json(&outcome);
        }
        Command::Compute => {
            let outcome = run_pool(threads, || pipeline::compute::run(&config, &levels))??;
            if let Some(warning) = &outcome.lowdata_warning {
                eprintln!("warning: {warning}");
            }
            print_json(&outcome);
        }
        Command::Report => {
            let outcome = pipeline::report::run(&config, first_level)?;
            print_json(&outcome);
        }
        Command::Changepoint => {
            let outcome = run_pool(threads, || pipeline::changepoint::run(&config, first_level))??;
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            print_json(&outcome);
        }
        Command::Correlate => {
            let outcome = pipeline::correlate::run(&config, first_level)?;
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            print_json(&outcome);
        }
        Command::Synth { out } => {
            let out = out.unwrap_or_else(|| config.synth.out.clone());
            let summary = synth::generate(&config.synth, &config.dates, &out)?;
            print_json(&summary);
        }
    }
    Ok(())
}
