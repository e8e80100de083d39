//! Choosing the number of clusters from the information-loss curve.
//!
//! ```bash
//! cargo run --release --example elbow_scan
//! ```

use infoclust::experiments::studies::{elbow_study, integrate_until, six_group_model};
use infoclust::SampleGrid;

fn main() -> infoclust::Result<()> {
    let t = 1.0;
    let params = six_group_model(t)?;
    let traj = integrate_until(&params, 8.0, 1e-3)?;
    let grid = SampleGrid::new(0.0, 0.25, 33)?;

    let result = elbow_study(&traj, &grid, t, 10, 200)?;
    println!("{} variants, g_tt({t}) = {:.4e}", params.variants(), result.g_tt);
    for ((ell, dg), f) in result.curve.iter().zip(&result.clusterings) {
        let mark = if *ell == result.ell_star { "  <- elbow" } else { "" };
        println!("ell={ell:>2}  delta_g={dg:.4e}  clusters={}{mark}", f.clusters());
    }
    Ok(())
}
