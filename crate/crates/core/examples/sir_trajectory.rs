//! Multi-variant SIR dynamics seen as replicator flow on the simplex.
//!
//! ```bash
//! cargo run --release --example sir_trajectory
//! ```

use infoclust::dynamics::integrate_sir;
use infoclust::SirParams;

fn main() -> infoclust::Result<()> {
    let params = SirParams::desk_default(5);
    let traj = integrate_sir(&params, 12.0, 1e-3)?;

    println!("{:>5} {:>8} {:>8} {:>10}  shares", "t", "S", "<d>", "g_tt");
    for k in (0..traj.len()).step_by(1500) {
        let s = &traj.states()[k];
        let shares: Vec<String> = traj.probabilities()[k].probs().iter().map(|x| format!("{x:.3}")).collect();
        println!(
            "{:>5.1} {:>8.4} {:>8.4} {:>10.3e}  {}",
            traj.times()[k],
            s.susceptible,
            traj.mean_couplings()[k],
            traj.fisher_at_index(k),
            shares.join(" ")
        );
    }

    let drift = traj.states().iter().map(|s| (s.total() - 1.0).abs()).fold(0.0, f64::max);
    println!("max |S + I + R - 1| = {drift:.1e}");

    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    println!("trajectory csv: {} rows", csv.iter().filter(|&&b| b == b'\n').count() - 1);
    Ok(())
}
