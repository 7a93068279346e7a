use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gatestab::pipeline::{self, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(name = "gatestab", version, about = "Gate-parameter stabilization pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pipeline config (JSON). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate R runs and write alpha.csv.
    Simulate,
    /// Solve for the stabilizer and write beta.
    Stabilize {
        #[arg(long)]
        alpha: Option<PathBuf>,
    },
    /// Run the learning pass over a random training set.
    Learn {
        #[arg(long)]
        alpha: Option<PathBuf>,
        #[arg(long)]
        stabilizer: Option<PathBuf>,
    },
    /// Fit stability classes and assign every run.
    Classify {
        #[arg(long)]
        beta: Option<PathBuf>,
    },
    /// Relative entropy, δ and μ against the configured target.
    Metrics {
        #[arg(long)]
        beta: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<PathBuf>,
    },
    /// Write the sinusoid, cos² and μ-grid figure data.
    Figures,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, PipelineError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = cli.out {
        config.out = Some(std::path::absolute(&out).unwrap_or(out));
    }
    match cli.command {
        Command::Simulate => pipeline::cmd_simulate(&config),
        Command::Stabilize { alpha } => pipeline::cmd_stabilize(&config, alpha.as_deref()),
        Command::Learn { alpha, stabilizer } => pipeline::cmd_learn(&config, alpha.as_deref(), stabilizer.as_deref()),
        Command::Classify { beta } => pipeline::cmd_classify(&config, beta.as_deref()),
        Command::Metrics { beta, alpha } => pipeline::cmd_metrics(&config, beta.as_deref(), alpha.as_deref()),
        Command::Figures => pipeline::cmd_figures(&config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
