//! Closed-form large-`n`, small-`dt` predictions for the sampled estimators.
//!
//! Everything here is a plain formula evaluator; no clamping or smoothing is
//! applied, so the values can be compared against Monte Carlo directly.

use std::f64::consts::PI;

use crate::error::Result;
use crate::simplex::Distribution;

/// Which terms of the large-`n` expansion a prediction contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Leading,
    WithSecondOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasVariancePrediction {
    pub expected_value: f64,
    pub variance: f64,
    pub order: Order,
}

impl BiasVariancePrediction {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Mean `N/n` and variance `2N/n²` of the squared Shahshahani distance between
/// a distribution with `N+1` outcomes and its empirical measure from `n` draws.
pub fn distance_moments(dof: usize, n: u64) -> (f64, f64) {
    let (dof, n) = (dof as f64, n as f64);
    (dof / n, 2.0 * dof / (n * n))
}

/// Leading bias `2N/(n dt²)` of the sampled Fisher information.
pub fn fisher_bias(dof: usize, n: u64, dt: f64) -> f64 {
    2.0 * dof as f64 / (n as f64 * dt * dt)
}

/// `(g_tt + 2N/(n dt²), 8 g_tt/(n dt²) + 8N/(n² dt⁴))`.
pub fn fisher_prediction(g_tt: f64, dof: usize, n: u64, dt: f64) -> BiasVariancePrediction {
    let (nf, dt2) = (n as f64, dt * dt);
    BiasVariancePrediction {
        expected_value: g_tt + fisher_bias(dof, n, dt),
        variance: 8.0 * g_tt / (nf * dt2) + 8.0 * dof as f64 / (nf * nf * dt2 * dt2),
        order: Order::Leading,
    }
}

/// The `n⁻²` term alone: `−(2N + 1 − Σ 1/p^μ)/(2 n² dt²)`.
pub fn second_order_correction(p: &Distribution, n: u64, dt: f64) -> Result<f64> {
    p.require_interior(0.0)?;
    let dof = p.dof() as f64;
    let inverse_sum: f64 = p.probs().iter().map(|x| 1.0 / x).sum();
    let nf = n as f64;
    Ok(-(2.0 * dof + 1.0 - inverse_sum) / (2.0 * nf * nf * dt * dt))
}

/// Bias including the `n⁻²` correction.
pub fn fisher_bias_second_order(p: &Distribution, n: u64, dt: f64) -> Result<f64> {
    Ok(fisher_bias(p.dof(), n, dt) + second_order_correction(p, n, dt)?)
}

/// `(g^f + 2(ℓ−1)/(n dt²), 8 g^f/(n dt²) + 8(ℓ−1)/(n² dt⁴))`; the `O(dt⁻²)`
/// part of the variance is not included.
pub fn clustered_fisher_prediction(g_f: f64, ell: usize, n: u64, dt: f64) -> BiasVariancePrediction {
    let mut pred = fisher_prediction(g_f, ell - 1, n, dt);
    pred.order = Order::Leading;
    pred
}

/// `(İ(1 + 1/(2n)), (2(1−p)/(p dt²) − İ²)/n)` for one variant.
pub fn info_rate_moments(rate: f64, share: f64, n: u64, dt: f64) -> (f64, f64) {
    let nf = n as f64;
    let mean = rate * (1.0 + 1.0 / (2.0 * nf));
    let variance = (2.0 / (dt * dt) * (1.0 - share) / share - rate * rate) / nf;
    (mean, variance)
}

/// Cluster analogue of [`info_rate_moments`] with `q^a` in place of `p^μ`.
pub fn cluster_info_rate_moments(rate: f64, cluster_share: f64, n: u64, dt: f64) -> (f64, f64) {
    info_rate_moments(rate, cluster_share, n, dt)
}

/// Gaussian approximation of `Z(p) = Σ_{x∈Δ^{(n)}} exp(−n D(x‖p))`:
/// `√(n Π 2πn p^μ / (2π Σ p^μ))`. Computed in log space to stay finite for
/// many variants.
pub fn normalization_z(p: &Distribution, n: u64) -> Result<f64> {
    p.require_interior(0.0)?;
    let nf = n as f64;
    let total: f64 = p.probs().iter().sum();
    let log_prod: f64 = p.probs().iter().map(|x| (2.0 * PI * nf * x).ln()).sum();
    Ok((0.5 * (nf.ln() + log_prod - (2.0 * PI * total).ln())).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::kl_divergence;

    #[test]
    fn distance_moment_values() {
        let (m, v) = distance_moments(3, 1000);
        assert!((m - 0.003).abs() < 1e-18 && (v - 6e-6).abs() < 1e-20);
        let (m2, _) = distance_moments(3, 2000);
        assert!((m2 - m / 2.0).abs() < 1e-18);
    }

    #[test]
    fn fisher_bias_values() {
        assert!((fisher_bias(9, 100_000, 0.25) - 0.00288).abs() < 1e-15);
        assert!(fisher_bias(9, 1 << 40, 0.25) < 1e-9);
        let pred = fisher_prediction(0.0, 9, 10_000, 0.25);
        assert!((pred.variance - 8.0 * 9.0 / (1e8 * 0.25f64.powi(4))).abs() < 1e-15);
        let pred = fisher_prediction(0.05, 9, 10_000, 0.25);
        assert!((pred.expected_value - 0.05 - 0.0288).abs() < 1e-15);
    }

    #[test]
    fn second_order_uniform_simplifies() {
        // 2N+1 − (N+1)² = −N², so the correction is N²/(2n²dt²).
        let (n, dt) = (1000u64, 0.25);
        for dof in 1..8usize {
            let p = Distribution::uniform(dof + 1);
            let c = second_order_correction(&p, n, dt).unwrap();
            let expected = (dof * dof) as f64 / (2.0 * (n * n) as f64 * dt * dt);
            assert!((c - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn second_order_correction_is_nonnegative_and_subleading() {
        let p = Distribution::new(vec![0.05, 0.15, 0.3, 0.5]).unwrap();
        let mut last_ratio = f64::INFINITY;
        for &n in &[100u64, 1000, 10_000, 100_000] {
            let c = second_order_correction(&p, n, 0.25).unwrap();
            assert!(c >= 0.0);
            assert!(fisher_bias_second_order(&p, n, 0.25).unwrap() >= fisher_bias(3, n, 0.25));
            let ratio = c / fisher_bias(3, n, 0.25);
            assert!(ratio < last_ratio);
            last_ratio = ratio;
        }
    }

    #[test]
    fn clustered_prediction_limits() {
        let full = clustered_fisher_prediction(0.07, 10, 30_000, 0.25);
        let plain = fisher_prediction(0.07, 9, 30_000, 0.25);
        assert_eq!(full.expected_value, plain.expected_value);
        assert_eq!(full.variance, plain.variance);
        let one = clustered_fisher_prediction(0.0, 1, 30_000, 0.25);
        assert_eq!(one.expected_value, 0.0);
        let ratio = fisher_bias(9, 1000, 0.25) / fisher_bias(2, 1000, 0.25);
        assert!((ratio - 4.5).abs() < 1e-14);
    }

    #[test]
    fn info_rate_moment_shapes() {
        assert_eq!(info_rate_moments(0.0, 0.3, 100, 0.25).0, 0.0);
        let v_small = info_rate_moments(0.1, 0.05, 1000, 0.25).1;
        let v_large = info_rate_moments(0.1, 0.4, 1000, 0.25).1;
        assert!(v_small > v_large);
        assert_eq!(
            cluster_info_rate_moments(0.2, 0.3, 500, 0.5),
            info_rate_moments(0.2, 0.3, 500, 0.5)
        );
    }

    #[test]
    fn normalization_closed_form_two_outcomes() {
        let p = Distribution::uniform(2);
        for &n in &[10u64, 100, 1000] {
            let z = normalization_z(&p, n).unwrap();
            let expected = (n as f64).powf(1.5) * (PI / 2.0).sqrt();
            assert!((z - expected).abs() < 1e-10 * expected);
        }
        assert!(normalization_z(&p, 2000).unwrap() > normalization_z(&p, 1000).unwrap());
    }

    #[test]
    fn normalization_against_lattice_sum() {
        // Brute-force Σ over the n+1 lattice points of Δ^{(n)} for two outcomes.
        // The closed form carries one extra factor n relative to the lattice
        // sum (its lattice density is n^{N+1} rather than n^N).
        for &(a, n) in &[(0.5, 200u64), (0.3, 400), (0.2, 1000)] {
            let p = Distribution::new(vec![a, 1.0 - a]).unwrap();
            let lattice: f64 = (0..=n)
                .map(|k| {
                    let x = Distribution::new(vec![k as f64 / n as f64, 1.0 - k as f64 / n as f64]).unwrap();
                    (-(n as f64) * kl_divergence(&x, &p).unwrap()).exp()
                })
                .sum();
            let z = normalization_z(&p, n).unwrap();
            let rel = (n as f64 * lattice / z - 1.0).abs();
            assert!(rel < 0.10, "a={a} n={n}: lattice {lattice}, z {z}");
        }
    }
}
