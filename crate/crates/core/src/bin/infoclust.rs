use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use infoclust::experiments::{run, RunOptions};

/// Run one configured experiment and write its CSV artifacts.
#[derive(Parser, Debug)]
#[command(name = "infoclust", version)]
struct Cli {
    /// Experiment config (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let options = RunOptions {
        seed: cli.seed,
        threads: cli.threads,
    };
    match run(&cli.config, &cli.out, &options) {
        Ok(manifest) => {
            for a in &manifest.artifacts {
                println!("{}", cli.out.join(&a.file).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("infoclust: {e}");
            ExitCode::FAILURE
        }
    }
}
