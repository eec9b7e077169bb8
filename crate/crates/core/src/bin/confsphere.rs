use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use confsphere::cli::{execute, parse_config_with, Command};

#[derive(Parser)]
#[command(name = "confsphere", version, about = "Monte Carlo studies of confidence sphere sequences")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simultaneous coverage over the horizon
    Coverage(Opts),
    /// Mean radius trajectory for one estimator
    Width(Opts),
    /// Mean radius trajectories for several estimators on shared streams
    Compare(Opts),
    /// Rate fits of radius trajectories
    Rate(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Exit nonzero when a coverage run misses 1 - alpha - 2 se
    #[arg(long = "assert")]
    assert: bool,
    /// Overrides the config output path
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        Cmd::Coverage(o) => (Command::Coverage, o),
        Cmd::Width(o) => (Command::Width, o),
        Cmd::Compare(o) => (Command::Compare, o),
        Cmd::Rate(o) => (Command::Rate, o),
    };
    match run(command, &opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, opts: &Opts) -> Result<bool, Box<dyn std::error::Error>> {
    if let Some(n) = opts.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let text = std::fs::read_to_string(&opts.config)?;
    let mut cfg = parse_config_with(&text, Some(command))?;
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &opts.out {
        cfg.output_path = out.clone();
    }
    let outcome = execute(&cfg)?;
    for line in outcome.summary() {
        println!("{line}");
    }
    println!("wrote {}", cfg.output_path.display());
    Ok(!opts.assert || outcome.passes())
}
