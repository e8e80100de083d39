//! Probability distributions on the simplex and the Shahshahani geometry.
//!
//! The metric `𝔤_μν = δ_μν / p^μ` on the open simplex makes the squared length
//! of a tangent vector `ṗ` equal to the Fisher information `Σ ṗ²/p`.

use crate::error::{Error, Result};

/// Deviation of the sum from 1 below which a vector is rescaled onto the simplex.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;
/// Tolerance on `Σ p = 1` after construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;
/// Tolerance on `Σ ṗ = 0` for tangent vectors, scaled by `max(1, ‖ṗ‖₁)`.
pub const TANGENCY_TOLERANCE: f64 = 1e-10;

/// A point of the simplex `Δ_{N+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates nonnegativity and normalization. Sums within
    /// [`RENORMALIZE_TOLERANCE`] of 1 are divided out exactly.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::argument("distribution must have at least one entry"));
        }
        for (index, &x) in probs.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Domain {
                    index,
                    reason: format!("probability {x} is negative or not finite"),
                });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::argument(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        let probs = if sum == 1.0 {
            probs
        } else {
            probs.into_iter().map(|x| x / sum).collect()
        };
        Ok(Distribution { probs })
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::argument("weights must have a positive finite sum"));
        }
        Distribution::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform distribution needs at least one entry");
        Distribution {
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Number of independent directions, `N` for a distribution of `N+1` entries.
    pub fn dof(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn is_interior(&self) -> bool {
        self.probs.iter().all(|&x| x > 0.0)
    }

    /// Fails with the first index whose probability does not exceed `floor`.
    pub fn require_interior(&self, floor: f64) -> Result<()> {
        match self.probs.iter().position(|&x| x <= floor) {
            None => Ok(()),
            Some(index) => Err(Error::Domain {
                index,
                reason: format!(
                    "probability {} is not above the interior floor {floor}",
                    self.probs[index]
                ),
            }),
        }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl AsRef<[f64]> for Distribution {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

/// A velocity tangent to the simplex: components sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    components: Vec<f64>,
}

impl TangentVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if let Some(index) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain {
                index,
                reason: "tangent component is not finite".into(),
            });
        }
        let sum: f64 = components.iter().sum();
        let scale: f64 = components.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
        if sum.abs() > TANGENCY_TOLERANCE * scale {
            return Err(Error::argument(format!(
                "tangent components sum to {sum}, not 0"
            )));
        }
        Ok(TangentVector { components })
    }

    pub fn zero(len: usize) -> Self {
        TangentVector {
            components: vec![0.0; len],
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

impl AsRef<[f64]> for TangentVector {
    fn as_ref(&self) -> &[f64] {
        &self.components
    }
}

/// Squared Shahshahani distance `Σ (point − reference)² / reference`.
pub fn shahshahani_distance_sq(reference: &Distribution, point: &Distribution) -> Result<f64> {
    Error::ensure_len(reference.len(), point.len())?;
    reference.require_interior(0.0)?;
    Ok(reference
        .probs
        .iter()
        .zip(&point.probs)
        .map(|(&r, &x)| (x - r) * (x - r) / r)
        .sum())
}

/// `D(point ‖ reference)` in nats, with `0·log 0 = 0`.
pub fn kl_divergence(point: &Distribution, reference: &Distribution) -> Result<f64> {
    Error::ensure_len(reference.len(), point.len())?;
    reference.require_interior(0.0)?;
    let d: f64 = point
        .probs
        .iter()
        .zip(&reference.probs)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &r)| x * (x / r).ln())
        .sum();
    // Rounding can push the sum a hair below zero when point ≈ reference.
    Ok(d.max(0.0))
}

/// Fisher information of the curve through `p` with velocity `pdot`: `Σ ṗ²/p`.
pub fn fisher_information(p: &Distribution, pdot: &TangentVector) -> Result<f64> {
    Error::ensure_len(p.len(), pdot.len())?;
    p.require_interior(0.0)?;
    Ok(p.probs
        .iter()
        .zip(&pdot.components)
        .map(|(&x, &v)| v * v / x)
        .sum())
}

/// Self-information rates `İ^μ = ṗ^μ / p^μ`.
pub fn self_information_rate(p: &Distribution, pdot: &TangentVector) -> Result<Vec<f64>> {
    Error::ensure_len(p.len(), pdot.len())?;
    p.require_interior(0.0)?;
    Ok(p.probs
        .iter()
        .zip(&pdot.components)
        .map(|(&x, &v)| v / x)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn construction_renormalizes_small_drift() {
        let d = Distribution::new(vec![0.5 + 4e-10, 0.5]).unwrap();
        let s: f64 = d.probs().iter().sum();
        assert!((s - 1.0).abs() < NORMALIZATION_TOLERANCE);
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.1, -0.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
    }

    #[test]
    fn interior_floor() {
        let d = dist(&[0.0, 1.0]);
        assert!(!d.is_interior());
        match d.require_interior(0.0) {
            Err(Error::Domain { index, .. }) => assert_eq!(index, 0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(dist(&[0.01, 0.99]).require_interior(0.05).is_err());
    }

    #[test]
    fn tangent_must_sum_to_zero() {
        assert!(TangentVector::new(vec![0.1, -0.1]).is_ok());
        assert!(TangentVector::new(vec![0.1, 0.1]).is_err());
    }

    #[test]
    fn distance_examples() {
        let p = dist(&[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(shahshahani_distance_sq(&p, &p).unwrap(), 0.0);
        // Reference first: the sum divides by the reference entries.
        let a = shahshahani_distance_sq(&dist(&[0.5, 0.5]), &dist(&[0.25, 0.75])).unwrap();
        assert!((a - 0.25).abs() < 1e-15, "{a}");
        let b = shahshahani_distance_sq(&dist(&[0.25, 0.75]), &dist(&[0.5, 0.5])).unwrap();
        assert!((b - 1.0 / 3.0).abs() < 1e-15, "{b}");
    }

    #[test]
    fn distance_rejects_boundary_reference() {
        let err = shahshahani_distance_sq(&dist(&[0.0, 1.0]), &dist(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(err, Error::Domain { index: 0, .. }));
    }

    #[test]
    fn kl_examples() {
        let p = dist(&[0.2, 0.3, 0.5]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let d = kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(kl_divergence(&p, &dist(&[0.0, 0.5, 0.5])).is_err());
    }

    #[test]
    fn fisher_examples() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(fisher_information(&p, &TangentVector::zero(2)).unwrap(), 0.0);
        let v = TangentVector::new(vec![0.1, -0.1]).unwrap();
        assert!((fisher_information(&p, &v).unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn info_rate_examples() {
        let p = dist(&[0.2, 0.8]);
        assert_eq!(
            self_information_rate(&p, &TangentVector::zero(2)).unwrap(),
            vec![0.0, 0.0]
        );
        let v = TangentVector::new(vec![0.02, -0.02]).unwrap();
        let rate = self_information_rate(&p, &v).unwrap();
        assert!((rate[0] - 0.1).abs() < 1e-15 && (rate[1] + 0.025).abs() < 1e-15);
    }

    fn interior(len: usize) -> impl Strategy<Value = Distribution> {
        prop::collection::vec(0.05f64..1.0, len).prop_map(|w| Distribution::from_weights(&w).unwrap())
    }

    fn tangent(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, len).prop_map(|mut v| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.iter_mut().for_each(|x| *x -= mean);
            v
        })
    }

    proptest! {
        #[test]
        fn distance_is_positive_off_diagonal(p in interior(5), q in interior(5)) {
            let a = shahshahani_distance_sq(&p, &q).unwrap();
            prop_assert!(a >= 0.0);
            let gap: f64 = p.probs().iter().zip(q.probs()).map(|(x, y)| (x - y).abs()).sum();
            if gap > 1e-9 { prop_assert!(a > 0.0); }
        }

        #[test]
        fn kl_matches_half_distance_to_third_order(p in interior(4), dir in tangent(4)) {
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let mut ratios = Vec::new();
            for &h in &[1e-2, 5e-3, 2.5e-3] {
                let q: Vec<f64> = p.probs().iter().zip(&dir).map(|(x, v)| x + h * v / norm * 0.04).collect();
                let q = Distribution::new(q).unwrap();
                let kl = kl_divergence(&q, &p).unwrap();
                prop_assert!(kl >= 0.0);
                let half = 0.5 * shahshahani_distance_sq(&p, &q).unwrap();
                let step: f64 = p.probs().iter().zip(q.probs()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                ratios.push((kl - half).abs() / step.powi(3));
            }
            // Bounded ratio: the cubic remainder is at most ~Σ 1/p² in size.
            let bound: f64 = p.probs().iter().map(|x| 1.0 / (x * x)).sum();
            for r in ratios { prop_assert!(r <= bound, "ratio {} bound {}", r, bound); }
        }

        #[test]
        fn fisher_equals_weighted_rate_square(p in interior(6), v in tangent(6)) {
            let v = TangentVector::new(v).unwrap();
            let g = fisher_information(&p, &v).unwrap();
            let rate = self_information_rate(&p, &v).unwrap();
            let alt: f64 = p.probs().iter().zip(&rate).map(|(x, r)| x * r * r).sum();
            prop_assert!((g - alt).abs() <= 1e-12 * g.max(1e-300));
            let tangency: f64 = p.probs().iter().zip(&rate).map(|(x, r)| x * r).sum();
            prop_assert!(tangency.abs() < 1e-10);
        }
    }
}
