//! Sampling bias of the Fisher-information estimator from two snapshots
//! `dt` apart: expected `g_tt + 2N/(n dt²)`.
//!
//! ```bash
//! cargo run --release --example fisher_bias
//! ```

use infoclust::dynamics::integrate_sir;
use infoclust::experiments::studies::{fisher_bias_vs_n, second_order_study};
use infoclust::SirParams;

fn main() -> infoclust::Result<()> {
    let traj = integrate_sir(&SirParams::desk_default(10), 6.0, 1e-3)?;
    let (t, dt) = (5.0, 0.25);

    println!("{:>7} {:>11} {:>9} {:>11} {:>9}", "n", "mc mean", "se", "predicted", "sd ratio");
    for row in fisher_bias_vs_n(&traj, t, dt, &[1000, 10_000, 100_000], 4000, 3)? {
        println!(
            "{:>7} {:>11.5} {:>9.1e} {:>11.5} {:>9.3}",
            row.n,
            row.mc.mean,
            row.mc.standard_error,
            row.theory.expected_value,
            row.mc.std / row.theory.sd()
        );
    }

    // What remains after removing the leading term, estimated with a control
    // variate. Compare it with N/(n² dt²) rather than the Gaussian formula.
    for row in second_order_study(&traj, t, dt, &[2500], 20_000, 5)? {
        let dof = traj.variants() as f64 - 1.0;
        let nf = row.n as f64;
        println!(
            "n={} residual {:.3e} +- {:.1e}; Gaussian {:.3e}; N/(n^2 dt^2) {:.3e}",
            row.n,
            row.residual(),
            row.mc.standard_error,
            row.predicted,
            dof / (nf * nf * dt * dt)
        );
    }
    Ok(())
}
