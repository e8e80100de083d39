//! Multinomial sampling of a trajectory and the estimators of the sampled model.
//!
//! At each instant of a [`SampleGrid`] the model distribution `p(t)` is sampled
//! `n` times with replacement; the empirical shares `p̂ = counts/n` form the
//! sampled model. Finite differences of neighbouring instants give the
//! estimators of the Fisher information and of the self-information rates,
//! all located at the midpoints `t0 + (k + 1/2)·dt`.

use std::io::Write;

use rand::Rng;
use rand_distr::{Binomial, Distribution as _};
use rayon::prelude::*;

use crate::clustering::Clustering;
use crate::csvfmt::fmt_f64;
use crate::dynamics::{trajectory_at, Trajectory};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, CounterRng};
use crate::simplex::Distribution;

/// Equally spaced sampling instants `t0 + k·dt`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    t0: f64,
    dt: f64,
    count: usize,
}

impl SampleGrid {
    pub fn new(t0: f64, dt: f64, count: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && t0.is_finite()) {
            return Err(Error::argument(format!("grid spacing must be positive, got dt={dt}")));
        }
        if count < 2 {
            return Err(Error::argument(format!("grid needs at least 2 instants, got {count}")));
        }
        Ok(SampleGrid { t0, dt, count })
    }

    /// Two instants at `t ∓ dt/2`, bracketing a single estimate at `t`.
    pub fn around(t: f64, dt: f64) -> Result<Self> {
        SampleGrid::new(t - 0.5 * dt, dt, 2)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn last_time(&self) -> f64 {
        self.time(self.count - 1)
    }

    /// Time of the estimate built from instants `k` and `k+1`.
    pub fn midpoint(&self, k: usize) -> f64 {
        self.t0 + (k as f64 + 0.5) * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.time(k))
    }

    /// Number of midpoint estimates (`count − 1`).
    pub fn intervals(&self) -> usize {
        self.count - 1
    }
}

/// Any series of distributions on a [`SampleGrid`] that the estimators accept:
/// raw samples, filtered samples, or exact model values.
pub trait ProbabilitySeries {
    fn grid(&self) -> &SampleGrid;
    fn probs_at(&self, k: usize) -> &[f64];

    fn variants(&self) -> usize {
        self.probs_at(0).len()
    }
}

/// Deterministic series of given distributions (e.g. exact `p` on the grid).
#[derive(Debug, Clone)]
pub struct DenseSeries {
    grid: SampleGrid,
    probs: Vec<Vec<f64>>,
}

impl DenseSeries {
    pub fn new(grid: SampleGrid, probs: Vec<Vec<f64>>) -> Result<Self> {
        Error::ensure_len(grid.count(), probs.len())?;
        let m = probs[0].len();
        for row in &probs {
            Error::ensure_len(m, row.len())?;
        }
        Ok(DenseSeries { grid, probs })
    }

    /// Exact model distributions at the grid instants.
    pub fn from_trajectory(traj: &Trajectory, grid: &SampleGrid) -> Result<Self> {
        let probs = grid
            .times()
            .map(|t| trajectory_at(traj, t).map(|pt| pt.p.probs().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        DenseSeries::new(*grid, probs)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.probs
    }
}

impl ProbabilitySeries for DenseSeries {
    fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    fn probs_at(&self, k: usize) -> &[f64] {
        &self.probs[k]
    }
}

/// Counts drawn at every grid instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    grid: SampleGrid,
    n: u64,
    seed: u64,
    counts: Vec<Vec<u64>>,
    empirical: Vec<Vec<f64>>,
}

impl SampledTrajectory {
    pub fn from_counts(grid: SampleGrid, n: u64, seed: u64, counts: Vec<Vec<u64>>) -> Result<Self> {
        Error::ensure_len(grid.count(), counts.len())?;
        for (k, row) in counts.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total != n {
                return Err(Error::argument(format!(
                    "counts at instant {k} sum to {total}, expected {n}"
                )));
            }
        }
        let empirical = counts
            .iter()
            .map(|row| row.iter().map(|&c| c as f64 / n as f64).collect())
            .collect();
        Ok(SampledTrajectory {
            grid,
            n,
            seed,
            counts,
            empirical,
        })
    }

    /// Samples the given distributions, one per grid instant, with per-instant
    /// sub-streams of `seed`.
    pub fn sample(grid: SampleGrid, dists: &[&Distribution], n: u64, seed: u64) -> Result<Self> {
        Error::ensure_len(grid.count(), dists.len())?;
        if n == 0 {
            return Err(Error::argument("sample size must be at least 1"));
        }
        let counts = dists
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut stream = CounterRng::substream(seed, k as u64);
                sample_multinomial(p, n, &mut stream)
            })
            .collect();
        SampledTrajectory::from_counts(grid, n, seed, counts)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// `t, n, count_1..count_{N+1}` with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let m = self.counts[0].len();
        let mut header = vec!["t".to_string(), "n".to_string()];
        header.extend((1..=m).map(|k| format!("count_{k}")));
        w.write_record(&header)?;
        for (k, row) in self.counts.iter().enumerate() {
            let mut rec = vec![fmt_f64(self.grid.time(k)), self.n.to_string()];
            rec.extend(row.iter().map(|c| c.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl ProbabilitySeries for SampledTrajectory {
    fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    fn probs_at(&self, k: usize) -> &[f64] {
        &self.empirical[k]
    }
}

/// Multinomial counts by sequential conditional binomials: variant `μ` receives
/// `Binomial(remaining, p^μ / remaining mass)` draws.
pub fn sample_multinomial<R: Rng + ?Sized>(p: &Distribution, n: u64, rng: &mut R) -> Vec<u64> {
    let probs = p.probs();
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass = 1.0f64;
    let last = probs.len() - 1;
    for (mu, &prob) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if mu == last {
            counts[mu] = remaining;
            break;
        }
        let share = if mass > 0.0 { (prob / mass).clamp(0.0, 1.0) } else { 1.0 };
        let k = if share >= 1.0 {
            remaining
        } else if share <= 0.0 {
            0
        } else {
            Binomial::new(remaining, share)
                .expect("share lies in (0, 1)")
                .sample(rng)
        };
        counts[mu] = k;
        remaining -= k;
        mass -= prob;
    }
    counts
}

/// Samples `traj` at every instant of `grid`. Instant `k` draws from the
/// sub-stream `seed ⊕ k`, so instants are independent of each other and of
/// evaluation order.
pub fn sample_trajectory(traj: &Trajectory, grid: &SampleGrid, n: u64, seed: u64) -> Result<SampledTrajectory> {
    let dists = grid
        .times()
        .map(|t| trajectory_at(traj, t).map(|pt| pt.p))
        .collect::<Result<Vec<_>>>()?;
    SampledTrajectory::sample(*grid, &dists, n, seed)
}

fn check_interval<S: ProbabilitySeries + ?Sized>(series: &S, k: usize) -> Result<()> {
    let intervals = series.grid().intervals();
    if k >= intervals {
        return Err(Error::Range {
            what: "interval index",
            value: k as f64,
            lo: 0.0,
            hi: intervals as f64 - 1.0,
        });
    }
    Ok(())
}

/// `𝔰 = 2/(a + b)`, or 0 when both shares vanish.
#[inline]
fn inverse_mean(sum: f64) -> f64 {
    if sum != 0.0 {
        2.0 / sum
    } else {
        0.0
    }
}

/// `Σ_μ 𝔰^μ ((p̂⁺ − p̂⁻)/dt)²` for two explicit distributions.
pub fn fisher_estimate(minus: &[f64], plus: &[f64], dt: f64) -> f64 {
    minus
        .iter()
        .zip(plus)
        .map(|(&a, &b)| {
            let rate = (b - a) / dt;
            inverse_mean(a + b) * rate * rate
        })
        .sum()
}

/// Cluster-summed analogue of [`fisher_estimate`].
pub fn clustered_fisher_estimate(minus: &[f64], plus: &[f64], dt: f64, f: &Clustering) -> f64 {
    let (qm, qp) = (f.aggregate(minus), f.aggregate(plus));
    fisher_estimate(&qm, &qp, dt)
}

/// `İ̂^μ = 𝔰^μ (p̂⁺ − p̂⁻)/dt`.
pub fn info_rate_estimate(minus: &[f64], plus: &[f64], dt: f64) -> Vec<f64> {
    minus
        .iter()
        .zip(plus)
        .map(|(&a, &b)| inverse_mean(a + b) * (b - a) / dt)
        .collect()
}

/// Per-cluster rates `𝕀̂̇^a`.
pub fn cluster_info_rate_estimate(minus: &[f64], plus: &[f64], dt: f64, f: &Clustering) -> Vec<f64> {
    info_rate_estimate(&f.aggregate(minus), &f.aggregate(plus), dt)
}

/// Sampled Fisher information from instants `k`, `k+1`; located at
/// [`SampleGrid::midpoint`]`(k)`.
pub fn fisher_hat<S: ProbabilitySeries + ?Sized>(series: &S, k: usize) -> Result<f64> {
    check_interval(series, k)?;
    Ok(fisher_estimate(series.probs_at(k), series.probs_at(k + 1), series.grid().dt()))
}

pub fn clustered_fisher_hat<S: ProbabilitySeries + ?Sized>(series: &S, k: usize, f: &Clustering) -> Result<f64> {
    check_interval(series, k)?;
    Error::ensure_len(f.len(), series.variants())?;
    Ok(clustered_fisher_estimate(
        series.probs_at(k),
        series.probs_at(k + 1),
        series.grid().dt(),
        f,
    ))
}

pub fn info_rate_hat<S: ProbabilitySeries + ?Sized>(series: &S, k: usize) -> Result<Vec<f64>> {
    check_interval(series, k)?;
    Ok(info_rate_estimate(series.probs_at(k), series.probs_at(k + 1), series.grid().dt()))
}

pub fn cluster_info_rate_hat<S: ProbabilitySeries + ?Sized>(
    series: &S,
    k: usize,
    f: &Clustering,
) -> Result<Vec<f64>> {
    check_interval(series, k)?;
    Error::ensure_len(f.len(), series.variants())?;
    Ok(cluster_info_rate_estimate(
        series.probs_at(k),
        series.probs_at(k + 1),
        series.grid().dt(),
        f,
    ))
}

/// Sampled estimator with a control variate whose mean is known exactly.
///
/// `C = Σ_a 2 (Q̂⁺ − Q̂⁻)² / ((Q⁺ + Q⁻) dt²)` uses the true cluster shares `Q±`
/// in the denominator; since each `Q̂` is binomial,
/// `E[C] = Σ_a 2 ((Q⁺ − Q⁻)² + (Q⁺(1−Q⁺) + Q⁻(1−Q⁻))/n) / ((Q⁺ + Q⁻) dt²)`.
/// Returns `ĝ^f − C + E[C]`, which has the same expectation as `ĝ^f` but
/// without its leading fluctuations. The identity clustering gives the
/// unclustered estimator.
pub fn control_variate_fisher(
    sample_minus: &[f64],
    sample_plus: &[f64],
    true_minus: &[f64],
    true_plus: &[f64],
    n: u64,
    dt: f64,
    f: &Clustering,
) -> f64 {
    let (hm, hp) = (f.aggregate(sample_minus), f.aggregate(sample_plus));
    let (qm, qp) = (f.aggregate(true_minus), f.aggregate(true_plus));
    let n = n as f64;
    let dt2 = dt * dt;
    let mut total = 0.0;
    for a in 0..hm.len() {
        let diff = hp[a] - hm[a];
        let est = inverse_mean(hp[a] + hm[a]) * diff * diff / dt2;
        let denom = qp[a] + qm[a];
        let control = 2.0 * diff * diff / (denom * dt2);
        let gap = qp[a] - qm[a];
        let mean = 2.0 * (gap * gap + (qp[a] * (1.0 - qp[a]) + qm[a] * (1.0 - qm[a])) / n) / (denom * dt2);
        total += est - control + mean;
    }
    total
}

/// Summary of repeated evaluations of an estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Sample standard deviation (denominator `R − 1`).
    pub std: f64,
    pub standard_error: f64,
    pub replications: usize,
}

impl MonteCarloEstimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let r = samples.len();
        if r < 2 {
            return Err(Error::argument(format!("need at least 2 replications, got {r}")));
        }
        let mean = samples.iter().sum::<f64>() / r as f64;
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        let std = (ss / (r - 1) as f64).sqrt();
        Ok(MonteCarloEstimate {
            mean,
            std,
            standard_error: std / (r as f64).sqrt(),
            replications: r,
        })
    }

    pub fn variance(&self) -> f64 {
        self.std * self.std
    }

    /// Standard error of `self.mean − other.mean` for independent estimates.
    pub fn combined_se(&self, other_se: f64) -> f64 {
        (self.standard_error.powi(2) + other_se.powi(2)).sqrt()
    }
}

/// Writes `label, mean, std, se, R` rows.
pub fn write_estimates_csv<W: Write>(out: W, rows: &[(String, MonteCarloEstimate)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "mean", "std", "se", "R"])?;
    for (label, e) in rows {
        w.write_record([
            label.clone(),
            fmt_f64(e.mean),
            fmt_f64(e.std),
            fmt_f64(e.standard_error),
            e.replications.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Seed handed to replication `index` of a run seeded with `seed`.
pub fn replication_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, (index as u64).wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Runs `experiment(replication_seed)` for each replication, possibly in
/// parallel, returning results in replication order.
pub fn replicate<T, F>(replications: usize, seed: u64, experiment: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if replications < 2 {
        return Err(Error::argument(format!(
            "need at least 2 replications, got {replications}"
        )));
    }
    (0..replications)
        .into_par_iter()
        .map(|index| {
            experiment(replication_seed(seed, index)).map_err(|e| Error::Replication {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Monte Carlo summary of a scalar estimator.
pub fn monte_carlo<F>(replications: usize, seed: u64, experiment: F) -> Result<MonteCarloEstimate>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    MonteCarloEstimate::from_samples(&replicate(replications, seed, experiment)?)
}

/// Component-wise Monte Carlo summary of a vector estimator.
pub fn monte_carlo_vec<F>(replications: usize, seed: u64, experiment: F) -> Result<Vec<MonteCarloEstimate>>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let rows = replicate(replications, seed, experiment)?;
    let width = rows[0].len();
    (0..width)
        .map(|j| {
            let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            MonteCarloEstimate::from_samples(&column)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_sir, SirParams};
    use crate::simplex::shahshahani_distance_sq;
    use crate::theory::distance_moments;

    #[test]
    fn degenerate_distribution_puts_everything_first() {
        let p = Distribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        let mut rng = CounterRng::new(3);
        for _ in 0..50 {
            assert_eq!(sample_multinomial(&p, 17, &mut rng), vec![17, 0, 0]);
        }
    }

    #[test]
    fn trailing_zero_shares_get_no_draws() {
        let p = Distribution::new(vec![0.3, 0.7, 0.0]).unwrap();
        let mut rng = CounterRng::new(3);
        for _ in 0..50 {
            let c = sample_multinomial(&p, 40, &mut rng);
            assert_eq!(c[2], 0);
            assert_eq!(c.iter().sum::<u64>(), 40);
        }
    }

    #[test]
    fn empirical_measure_is_unbiased() {
        let p = Distribution::new(vec![0.3, 0.7]).unwrap();
        let est = monte_carlo(10_000, 11, |seed| {
            let c = sample_multinomial(&p, 100, &mut CounterRng::new(seed));
            Ok(c[0] as f64 / 100.0)
        })
        .unwrap();
        assert!((est.mean - 0.3).abs() < 3.0 * est.standard_error, "{est:?}");
    }

    #[test]
    fn binomial_goodness_of_fit() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        // Exact outcome probabilities C(5,k) 0.4^k 0.6^(5−k) by enumeration.
        let binom = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
        let expected: Vec<f64> = (0..6)
            .map(|k| binom[k] * 0.4f64.powi(k as i32) * 0.6f64.powi(5 - k as i32))
            .collect();
        assert!((expected.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let p = Distribution::new(vec![0.4, 0.6]).unwrap();
        let reps = 100_000;
        let mut observed = [0u64; 6];
        let mut rng = CounterRng::new(99);
        for _ in 0..reps {
            observed[sample_multinomial(&p, 5, &mut rng)[0] as usize] += 1;
        }
        let chi2: f64 = observed
            .iter()
            .zip(&expected)
            .map(|(&o, &e)| {
                let e = e * reps as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        let pvalue = 1.0 - ChiSquared::new(5.0).unwrap().cdf(chi2);
        assert!(pvalue > 1e-3, "chi2 = {chi2}, p = {pvalue}");
    }

    fn small_trajectory() -> Trajectory {
        integrate_sir(&SirParams::desk_default(10), 10.0, 1e-3).unwrap()
    }

    #[test]
    fn trajectory_sampling_is_deterministic() {
        let traj = small_trajectory();
        let grid = SampleGrid::new(1.0, 0.25, 9).unwrap();
        let a = sample_trajectory(&traj, &grid, 5000, 7).unwrap();
        let b = sample_trajectory(&traj, &grid, 5000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.counts().iter().all(|row| row.iter().sum::<u64>() == 5000));
        let c = sample_trajectory(&traj, &grid, 5000, 8).unwrap();
        assert_ne!(a.counts(), c.counts());
    }

    #[test]
    fn instants_are_order_insensitive() {
        // The instant at t=2 must not depend on which other instants are sampled.
        let traj = small_trajectory();
        let wide = sample_trajectory(&traj, &SampleGrid::new(1.0, 0.5, 5).unwrap(), 1000, 5).unwrap();
        let p = trajectory_at(&traj, 2.0).unwrap().p;
        let direct = sample_multinomial(p, 1000, &mut CounterRng::substream(5, 2));
        assert_eq!(wide.counts()[2], direct);
    }

    #[test]
    fn large_samples_converge() {
        let traj = small_trajectory();
        let grid = SampleGrid::new(0.0, 0.25, 41).unwrap();
        let s = sample_trajectory(&traj, &grid, 10_000_000, 1).unwrap();
        for k in 0..grid.count() {
            let p = trajectory_at(&traj, grid.time(k)).unwrap().p;
            for (a, b) in s.probs_at(k).iter().zip(p.probs()) {
                assert!((a - b).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn grid_outside_trajectory_is_range_error() {
        let traj = small_trajectory();
        let grid = SampleGrid::new(9.0, 0.5, 4).unwrap();
        assert!(matches!(sample_trajectory(&traj, &grid, 10, 0), Err(Error::Range { .. })));
    }

    #[test]
    fn fisher_hat_examples() {
        let grid = SampleGrid::new(0.0, 0.25, 2).unwrap();
        let s = DenseSeries::new(grid, vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(fisher_hat(&s, 0).unwrap(), 0.0);
        assert_eq!(info_rate_hat(&s, 0).unwrap(), vec![0.0, 0.0]);
        let s = DenseSeries::new(grid, vec![vec![0.5, 0.5], vec![0.6, 0.4]]).unwrap();
        let expected = (0.01 / 0.0625) * (1.0 / 0.55 + 1.0 / 0.45);
        assert!((fisher_hat(&s, 0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.646_464_646_464_646_4).abs() < 1e-12);
        assert!(fisher_hat(&s, 1).is_err());
    }

    #[test]
    fn vanishing_shares_contribute_zero() {
        let rate = info_rate_estimate(&[0.0, 0.5, 0.5], &[0.0, 0.25, 0.75], 0.5);
        assert_eq!(rate[0], 0.0);
        assert!((rate[1] + 4.0 / 3.0).abs() < 1e-15);
        let g = fisher_estimate(&[0.0, 0.5, 0.5], &[0.0, 0.25, 0.75], 0.5);
        assert!(g.is_finite() && g > 0.0);
    }

    #[test]
    fn clustered_estimators_limits() {
        let grid = SampleGrid::new(0.0, 0.25, 2).unwrap();
        let s = DenseSeries::new(grid, vec![vec![0.2, 0.3, 0.5], vec![0.25, 0.2, 0.55]]).unwrap();
        let id = Clustering::identity(3);
        assert_eq!(clustered_fisher_hat(&s, 0, &id).unwrap(), fisher_hat(&s, 0).unwrap());
        assert_eq!(cluster_info_rate_hat(&s, 0, &id).unwrap(), info_rate_hat(&s, 0).unwrap());
        let one = Clustering::new(vec![0, 0, 0]).unwrap();
        assert_eq!(clustered_fisher_hat(&s, 0, &one).unwrap(), 0.0);
        assert_eq!(cluster_info_rate_hat(&s, 0, &one).unwrap(), vec![0.0]);
        let wrong = Clustering::identity(4);
        assert!(clustered_fisher_hat(&s, 0, &wrong).is_err());
    }

    #[test]
    fn monte_carlo_constant() {
        let est = monte_carlo(16, 0, |_| Ok(2.5)).unwrap();
        assert_eq!(est.mean, 2.5);
        assert_eq!(est.std, 0.0);
        assert!(monte_carlo(1, 0, |_| Ok(1.0)).is_err());
    }

    #[test]
    fn monte_carlo_reports_failing_replication() {
        let err = monte_carlo(10, 0, |seed| {
            if seed == replication_seed(0, 6) {
                Err(Error::argument("boom"))
            } else {
                Ok(0.0)
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Replication { index: 6, .. }), "{err}");
    }

    #[test]
    fn monte_carlo_is_schedule_independent() {
        let run = || {
            replicate(64, 5, |seed| Ok(CounterRng::new(seed).random::<f64>())).unwrap()
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(run);
        assert_eq!(serial, run());
    }

    #[test]
    fn distance_mean_matches_closed_form() {
        let p = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let est = monte_carlo(2000, 4, |seed| {
            let c = sample_multinomial(&p, 1000, &mut CounterRng::new(seed));
            let q = Distribution::new(c.iter().map(|&x| x as f64 / 1000.0).collect())?;
            shahshahani_distance_sq(&p, &q)
        })
        .unwrap();
        let (mean, _) = distance_moments(3, 1000);
        assert!((est.mean - mean).abs() <= 3.0 * est.standard_error, "{est:?}");
    }

    #[test]
    fn control_variate_has_the_estimator_mean() {
        // Exact expectation by enumerating all binomial outcomes at both instants.
        let (pm, pp, n, dt) = (0.3f64, 0.36f64, 12u64, 0.5);
        let pmf = |p: f64, k: u64| {
            let mut c = 1.0;
            for j in 0..k {
                c *= (n - j) as f64 / (j + 1) as f64;
            }
            c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
        };
        let id = Clustering::identity(2);
        let (mut plain, mut cv) = (0.0, 0.0);
        for a in 0..=n {
            for b in 0..=n {
                let w = pmf(pm, a) * pmf(pp, b);
                let sm = [a as f64 / n as f64, 1.0 - a as f64 / n as f64];
                let sp = [b as f64 / n as f64, 1.0 - b as f64 / n as f64];
                plain += w * fisher_estimate(&sm, &sp, dt);
                cv += w * control_variate_fisher(&sm, &sp, &[pm, 1.0 - pm], &[pp, 1.0 - pp], n, dt, &id);
            }
        }
        assert!((plain - cv).abs() < 1e-12 * plain, "{plain} vs {cv}");
    }

    #[test]
    fn csv_exports() {
        let grid = SampleGrid::new(0.0, 0.5, 2).unwrap();
        let s = SampledTrajectory::from_counts(grid, 4, 0, vec![vec![1, 3], vec![2, 2]]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,n,count_1,count_2");
        assert!(text.lines().nth(2).unwrap().ends_with(",4,2,2"));
        assert!(SampledTrajectory::from_counts(grid, 4, 0, vec![vec![1, 2], vec![2, 2]]).is_err());

        let est = MonteCarloEstimate::from_samples(&[1.0, 3.0]).unwrap();
        let mut buf = Vec::new();
        write_estimates_csv(&mut buf, &[("x".into(), est)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "label,mean,std,se,R");
        assert!(text.lines().nth(1).unwrap().starts_with("x,2.0000000000000000e0,"));
    }
}
