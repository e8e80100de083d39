//! Information lost by grouping variants, and the bias saved by estimating
//! the coarser quantity from the same samples.
//!
//! ```bash
//! cargo run --release --example clustering_loss
//! ```

use infoclust::clustering::{clustered_fisher, delta_g_coupling_form, delta_g_prob_form, sufficiency_residuals};
use infoclust::dynamics::{integrate_sir, trajectory_at};
use infoclust::experiments::studies::clustered_bias_study;
use infoclust::{Clustering, SirParams};

fn main() -> infoclust::Result<()> {
    // Three rate groups; the grouping that respects them loses nothing.
    let params = SirParams::grouped(&[(1.6, 0.9, 3), (2.0, 1.0, 4), (2.4, 1.1, 3)], 0.9445);
    let traj = integrate_sir(&params, 6.0, 1e-3)?;
    let pt = trajectory_at(&traj, 5.0)?;

    let by_group = Clustering::new(vec![0, 0, 0, 1, 1, 1, 1, 2, 2, 2])?;
    let mixed = Clustering::new(vec![0, 1, 2, 0, 1, 2, 0, 1, 2, 0])?;
    for (name, f) in [("by group", &by_group), ("mixed", &mixed)] {
        println!(
            "{name:>9}: g_F = {:.4e}  delta_g = {:.3e} (coupling form {:.3e})  sufficiency residual {:.1e}",
            clustered_fisher(pt.p, pt.pdot, f)?,
            delta_g_prob_form(pt.p, pt.pdot, f)?,
            delta_g_coupling_form(pt.p, pt.couplings, f)?,
            sufficiency_residuals(&traj, f)?
        );
    }

    let varied = integrate_sir(&SirParams::desk_default(10), 6.0, 1e-3)?;
    let f = Clustering::new(vec![0, 0, 0, 0, 1, 1, 1, 2, 2, 2])?;
    for row in clustered_bias_study(&varied, 5.0, 0.25, &f, &[10_000], 4000, 9)? {
        println!(
            "n={}: plain bias {:.3e} (pred {:.3e}), clustered bias {:.3e} (pred {:.3e})",
            row.n,
            row.plain_bias(),
            row.plain_theory.expected_value - row.g_tt,
            row.clustered_bias(),
            row.clustered_theory.expected_value - row.g_f
        );
    }
    Ok(())
}
