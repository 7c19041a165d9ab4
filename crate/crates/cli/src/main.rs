mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trendlab::lab::Verdict;
use trendlab::LabError;

use config::ExperimentConfig;
use output::Artifacts;

#[derive(Parser)]
#[command(name = "trendlab", version, about = "Trend-contaminated spectral estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment TOML file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config, default `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo replications.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample clean and contaminated paths on every horizon.
    Simulate(RunArgs),
    /// Periodogram, smoothed functional and quadratic form per horizon.
    Periodogram(RunArgs),
    /// Whittle estimates from the clean and contaminated path.
    Estimate(RunArgs),
    /// Evaluate the robustness conditions for (alpha, beta, gamma, memory).
    CheckConditions(RunArgs),
    /// Deterministic trend terms and paired Monte Carlo over the horizon ladder.
    Robustness(RunArgs),
    /// Monte Carlo check of the functional's asymptotic normality.
    Clt(RunArgs),
}

fn exit_code(err: &LabError) -> u8 {
    match err {
        LabError::Validation(_) | LabError::Domain(_) => 2,
        LabError::Numerical { .. } | LabError::EmbeddingNotPsd { .. } => 3,
        LabError::Usage(_) => 1,
    }
}

fn run(command: Command) -> trendlab::Result<()> {
    let (name, args) = match &command {
        Command::Simulate(a) => ("simulate", a),
        Command::Periodogram(a) => ("periodogram", a),
        Command::Estimate(a) => ("estimate", a),
        Command::CheckConditions(a) => ("check-conditions", a),
        Command::Robustness(a) => ("robustness", a),
        Command::Clt(a) => ("clt", a),
    };
    let file = ExperimentConfig::from_file(&args.config)?;
    let cfg = file.resolve(args.seed, args.workers)?;
    let dir = args
        .out
        .clone()
        .or_else(|| file.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut out = Artifacts::create(&dir)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| LabError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match command {
        Command::Simulate(_) => commands::simulate(&cfg, &mut out),
        Command::Periodogram(_) => commands::periodogram(&cfg, &mut out),
        Command::Estimate(_) => commands::estimate_cmd(&cfg, &mut out),
        Command::CheckConditions(_) => {
            let report = commands::conditions(&cfg, &mut out)?;
            let verdict = match report.verdict {
                Verdict::TheoremApplies => "THEOREM_APPLIES",
                Verdict::NotCovered => "NOT_COVERED",
            };
            println!("{verdict}");
            Ok(())
        }
        Command::Robustness(_) => commands::robustness(&cfg, &mut out),
        Command::Clt(_) => commands::clt(&cfg, &mut out),
    })?;

    eprintln!("{name}: wrote {} file(s) to {}", out.written().len(), dir.display());
    Ok(())
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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
