mod commands;
mod specs;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "gbv", version, about = "Generalized bounded variation experiments")]
struct Cli {
    /// Report file; the report goes to stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: OutputFormat,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a variation functional on a sampled function.
    Variation(commands::VariationArgs),
    /// Scan an embedding criterion over levels.
    Criterion(commands::CriterionArgs),
    /// Build and certify a counterexample construction.
    Counterexample(commands::CounterexampleArgs),
    /// Run a seeded inequality suite.
    Inequality(commands::InequalityArgs),
    /// Luxemburg-type norm of a sampled function.
    Norm(commands::NormArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Variation(_) => "variation",
            Command::Criterion(_) => "criterion",
            Command::Counterexample(_) => "counterexample",
            Command::Inequality(_) => "inequality",
            Command::Norm(_) => "norm",
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a serde_json::Value,
    result: &'a serde_json::Value,
}

fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    let out = match &cli.command {
        Command::Variation(a) => commands::variation(a)?,
        Command::Criterion(a) => commands::criterion(a)?,
        Command::Counterexample(a) => commands::counterexample(a)?,
        Command::Inequality(a) => commands::inequality(a)?,
        Command::Norm(a) => commands::norm(a)?,
    };
    let body = match cli.format {
        OutputFormat::Csv => out.csv.clone(),
        OutputFormat::Json => {
            let report = Report {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: cli.command.name(),
                config: &out.config,
                result: &out.result,
            };
            serde_json::to_string_pretty(&report)? + "\n"
        }
    };
    match &cli.output {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", out.summary);
        }
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            eprintln!("{}", out.summary);
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("GBV_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) if out.failed => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let hypothesis = e
                .downcast_ref::<gbv_core::Error>()
                .is_some_and(gbv_core::Error::is_hypothesis);
            ExitCode::from(if hypothesis { 2 } else { 1 })
        }
    }
}
