//! Runs a full experiment through the config-driven runner, the same path the
//! `infoclust` binary takes, and prints the artifacts it produced.
//!
//! ```bash
//! cargo run --release --example theory_vs_mc
//! ```

use std::fs;

use infoclust::experiments::{run, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("infoclust-theory-vs-mc");
    fs::create_dir_all(&dir)?;
    let config = dir.join("theory.conf");
    fs::write(&config, "experiment = theory-vs-mc\nreplications = 1000\nseed = 2024\n")?;

    let manifest = run(&config, &dir.join("out"), &RunOptions { seed: None, threads: 0 })?;
    println!("{} (config {})", manifest.experiment, &manifest.config_sha256[..12]);
    for a in &manifest.artifacts {
        println!("  {} {} bytes sha256 {}", a.file, a.bytes, &a.sha256[..12]);
    }
    print!("{}", fs::read_to_string(dir.join("out").join("theory_vs_mc.csv"))?);
    Ok(())
}
