//! Smoothing a sampled trajectory before differencing it.
//!
//! ```bash
//! cargo run --release --example gaussian_filtering
//! ```

use infoclust::dynamics::integrate_sir;
use infoclust::experiments::studies::filtering_study;
use infoclust::filtering::{gaussian_kernel, DEFAULT_HALF_WIDTH, DEFAULT_SHAPE};
use infoclust::{SampleGrid, SirParams};

fn main() -> infoclust::Result<()> {
    let traj = integrate_sir(&SirParams::desk_default(8), 10.0, 1e-3)?;
    let grid = SampleGrid::new(0.0, 0.25, 41)?;
    let kernel = gaussian_kernel(DEFAULT_HALF_WIDTH, DEFAULT_SHAPE)?;
    println!("kernel: {:?}", kernel.iter().map(|w| format!("{w:.4}")).collect::<Vec<_>>());

    let result = filtering_study(&traj, &grid, 20_000, 17, &kernel)?;
    println!("{:>7} {:>10} {:>10} {:>7}", "variant", "raw rmse", "filtered", "ratio");
    for (mu, (raw, filt)) in result.rmse_raw.iter().zip(&result.rmse_filtered).enumerate() {
        println!("{mu:>7} {raw:>10.4} {filt:>10.4} {:>7.3}", filt / raw);
    }

    let mid = &result.points[result.points.len() / 2];
    println!(
        "t={:.3}, variant 0: exact {:.4}, raw {:.4} +- {:.4}, filtered {:.4}",
        mid.t, mid.exact[0], mid.raw[0], mid.raw_sd[0], mid.filtered[0]
    );
    Ok(())
}
