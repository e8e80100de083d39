//! Squared Shahshahani distance between a distribution and its empirical
//! measure, compared with the `N/n` mean and `2N/n²` variance.
//!
//! ```bash
//! cargo run --release --example distance_moments
//! ```

use infoclust::experiments::studies::distance_study;
use infoclust::simplex::{kl_divergence, shahshahani_distance_sq};
use infoclust::{CounterRng, Distribution};
use infoclust::sampling::sample_multinomial;

fn main() -> infoclust::Result<()> {
    let p = Distribution::from_weights(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])?;

    let mut rng = CounterRng::new(7);
    let counts = sample_multinomial(&p, 1000, &mut rng);
    let q = Distribution::from_weights(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>())?;
    println!(
        "one draw of n=1000: D^2 = {:.3e}, 2 KL = {:.3e}",
        shahshahani_distance_sq(&p, &q)?,
        2.0 * kl_divergence(&q, &p)?
    );

    println!("{:>7} {:>12} {:>10} {:>12} {:>12}", "n", "mean", "se", "N/n", "var ratio");
    for row in distance_study(&p, &[100, 1000, 10_000], 4000, 11)? {
        println!(
            "{:>7} {:>12.4e} {:>10.1e} {:>12.4e} {:>12.3}",
            row.n,
            row.mc.mean,
            row.mc.standard_error,
            row.theory_mean,
            row.mc.variance() / row.theory_var
        );
    }
    Ok(())
}
