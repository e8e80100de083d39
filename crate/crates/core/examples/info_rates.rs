//! Per-variant and per-cluster self-information rates `İ = ṗ/p` estimated
//! from sampled snapshots.
//!
//! ```bash
//! cargo run --release --example info_rates
//! ```

use infoclust::clustering::{kmeans, kmeans_features};
use infoclust::dynamics::integrate_sir;
use infoclust::experiments::studies::info_rate_study;
use infoclust::{SampleGrid, SirParams};

fn main() -> infoclust::Result<()> {
    let traj = integrate_sir(&SirParams::desk_default(6), 10.0, 1e-3)?;
    let grid = SampleGrid::new(0.0, 0.25, 41)?;
    let f = kmeans(&kmeans_features(&traj, &grid)?, 2, 100)?.clustering;
    println!("clusters: {:?}", f.labels());

    println!("{:>8} {:>3} {:>9} {:>9} {:>8} {:>6}", "kind", "idx", "exact", "mc", "se", "z");
    for row in info_rate_study(&traj, 5.0, 0.25, &f, &[20_000], 2000, 4)? {
        let z = (row.mc.mean - row.theory_mean) / row.mc.standard_error;
        let kind = row.kind.name();
        println!(
            "{kind:>8} {:>3} {:>9.5} {:>9.5} {:>8.1e} {:>6.2}",
            row.index, row.exact, row.mc.mean, row.mc.standard_error, z
        );
    }
    Ok(())
}
