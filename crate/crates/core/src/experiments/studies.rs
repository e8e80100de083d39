//! The numerical studies behind each experiment, returning typed rows.

use crate::clustering::{
    clustered_fisher, delta_g_prob_form, elbow_select, kmeans, kmeans_features, Clustering,
};
use crate::dynamics::{integrate_sir, trajectory_at, SirParams, Trajectory, DESK_S0};
use crate::error::{Error, Result};
use crate::filtering::filter_trajectory;
use crate::rng::{derive_seed, CounterRng};
use crate::sampling::{
    cluster_info_rate_estimate, clustered_fisher_estimate, control_variate_fisher, fisher_estimate,
    info_rate_estimate, info_rate_hat, monte_carlo, monte_carlo_vec, sample_multinomial,
    sample_trajectory, MonteCarloEstimate, ProbabilitySeries, SampleGrid,
};
use crate::simplex::{self_information_rate, shahshahani_distance_sq, Distribution};
use crate::theory::{
    clustered_fisher_prediction, cluster_info_rate_moments, distance_moments, fisher_bias,
    fisher_prediction, info_rate_moments, second_order_correction, BiasVariancePrediction,
};

/// Integrates far enough to cover `t_needed`, rounding up to whole steps.
pub fn integrate_until(params: &SirParams, t_needed: f64, step: f64) -> Result<Trajectory> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("fine_step must be positive, got {step}")));
    }
    let steps = (t_needed / step - 1e-9).ceil().max(1.0);
    integrate_sir(params, steps * step, step)
}

/// Fifty variants in six groups arranged as three pairs. Groups in a pair
/// share γ and differ by `0.1` in ε; the pairs have γ = 1.5, 2.0, 2.5 and ε
/// chosen so every pair has the same two coupling values at `t_ref`. Members
/// of a group differ by `1e-4` in ε so no two variants coincide. Late `t_ref`
/// values push ε negative once `S` falls below about `0.2`, which is rejected.
pub fn six_group_model(t_ref: f64) -> Result<SirParams> {
    const SIZES: [usize; 6] = [9, 8, 8, 9, 8, 8];
    const GAMMA: [f64; 3] = [1.5, 2.0, 2.5];
    const LEVEL: f64 = 0.3;
    const GAP: f64 = 0.1;
    let build = |s_ref: f64| {
        let mut gamma = Vec::new();
        let mut epsilon = Vec::new();
        for (g, &size) in SIZES.iter().enumerate() {
            let rate = GAMMA[g / 2];
            let base = rate * s_ref - LEVEL + if g % 2 == 1 { GAP } else { 0.0 };
            for k in 0..size {
                gamma.push(rate);
                epsilon.push(base + 1e-4 * (k as f64 - (size as f64 - 1.0) / 2.0));
            }
        }
        let m = gamma.len();
        SirParams {
            gamma,
            epsilon,
            s0: DESK_S0,
            i0: vec![(1.0 - DESK_S0) / m as f64; m],
            r0: 0.0,
        }
    };
    // S(t_ref) depends weakly on ε; a few fixed-point sweeps settle it.
    let step = 1e-3;
    let mut s_ref = DESK_S0;
    for _ in 0..8 {
        let traj = integrate_until(&build(s_ref), t_ref, step)?;
        s_ref = trajectory_at(&traj, t_ref)?.susceptible;
    }
    Ok(build(s_ref))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub n: u64,
    pub mc: MonteCarloEstimate,
    pub theory_mean: f64,
    pub theory_var: f64,
}

/// Squared distance between `p` and its empirical measure, for each `n`.
pub fn distance_study(p: &Distribution, ns: &[u64], replications: usize, seed: u64) -> Result<Vec<DistanceRow>> {
    ns.iter()
        .enumerate()
        .map(|(i, &n)| {
            let mc = monte_carlo(replications, derive_seed(seed, i as u64), |s| {
                let mut rng = CounterRng::new(s);
                let counts = sample_multinomial(p, n, &mut rng);
                let hat: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
                shahshahani_distance_sq(p, &Distribution::new(hat)?)
            })?;
            let (theory_mean, theory_var) = distance_moments(p.dof(), n);
            Ok(DistanceRow {
                n,
                mc,
                theory_mean,
                theory_var,
            })
        })
        .collect()
}

/// Exact values at an estimate time and the bracketing instants `t ∓ dt/2`.
#[derive(Debug, Clone)]
pub struct Bracket {
    pub t: f64,
    pub dt: f64,
    pub p: Distribution,
    pub rates: Vec<f64>,
    pub g_tt: f64,
    pub minus: Distribution,
    pub plus: Distribution,
}

impl Bracket {
    pub fn new(traj: &Trajectory, t: f64, dt: f64) -> Result<Self> {
        let mid = trajectory_at(traj, t)?;
        let grid = SampleGrid::around(t, dt)?;
        let minus = trajectory_at(traj, grid.time(0))?.p.clone();
        let plus = trajectory_at(traj, grid.time(1))?.p.clone();
        Ok(Bracket {
            t,
            dt,
            p: mid.p.clone(),
            rates: self_information_rate(mid.p, mid.pdot)?,
            g_tt: crate::simplex::fisher_information(mid.p, mid.pdot)?,
            minus,
            plus,
        })
    }

    pub fn clustered_fisher(&self, traj: &Trajectory, f: &Clustering) -> Result<f64> {
        let mid = trajectory_at(traj, self.t)?;
        clustered_fisher(mid.p, mid.pdot, f)
    }

    /// Draws `(p̂⁻, p̂⁺)` from the sub-streams of `seed`.
    pub fn draw(&self, n: u64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let empirical = |k: u64, p: &Distribution| -> Vec<f64> {
            let mut rng = CounterRng::substream(seed, k);
            sample_multinomial(p, n, &mut rng)
                .into_iter()
                .map(|c| c as f64 / n as f64)
                .collect()
        };
        (empirical(0, &self.minus), empirical(1, &self.plus))
    }

    /// Monte Carlo of a vector statistic of one bracketing sample pair.
    pub fn monte_carlo<F>(&self, n: u64, replications: usize, seed: u64, stat: F) -> Result<Vec<MonteCarloEstimate>>
    where
        F: Fn(&[f64], &[f64]) -> Vec<f64> + Sync,
    {
        monte_carlo_vec(replications, seed, |s| {
            let (minus, plus) = self.draw(n, s);
            Ok(stat(&minus, &plus))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherBiasRow {
    pub n: u64,
    pub t: f64,
    pub g_tt: f64,
    pub mc: MonteCarloEstimate,
    pub theory: BiasVariancePrediction,
}

/// `ĝ_tt` at a fixed `t` for each `n`.
pub fn fisher_bias_vs_n(
    traj: &Trajectory,
    t: f64,
    dt: f64,
    ns: &[u64],
    replications: usize,
    seed: u64,
) -> Result<Vec<FisherBiasRow>> {
    let bracket = Bracket::new(traj, t, dt)?;
    ns.iter()
        .enumerate()
        .map(|(i, &n)| {
            let mc = bracket.monte_carlo(n, replications, derive_seed(seed, i as u64), |a, b| {
                vec![fisher_estimate(a, b, dt)]
            })?[0];
            Ok(FisherBiasRow {
                n,
                t,
                g_tt: bracket.g_tt,
                mc,
                theory: fisher_prediction(bracket.g_tt, bracket.p.dof(), n, dt),
            })
        })
        .collect()
}

/// `ĝ_tt` at every midpoint of `grid` from whole sampled trajectories.
pub fn fisher_bias_vs_t(
    traj: &Trajectory,
    grid: &SampleGrid,
    n: u64,
    replications: usize,
    seed: u64,
) -> Result<Vec<FisherBiasRow>> {
    let dt = grid.dt();
    let estimates = monte_carlo_vec(replications, seed, |s| {
        let sampled = sample_trajectory(traj, grid, n, s)?;
        (0..grid.intervals())
            .map(|k| crate::sampling::fisher_hat(&sampled, k))
            .collect()
    })?;
    estimates
        .into_iter()
        .enumerate()
        .map(|(k, mc)| {
            let t = grid.midpoint(k);
            let pt = trajectory_at(traj, t)?;
            let g_tt = crate::simplex::fisher_information(pt.p, pt.pdot)?;
            Ok(FisherBiasRow {
                n,
                t,
                g_tt,
                mc,
                theory: fisher_prediction(g_tt, pt.p.dof(), n, dt),
            })
        })
        .collect()
}

/// Unclustered and clustered estimators from the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredBiasRow {
    pub n: u64,
    pub ell: usize,
    pub g_tt: f64,
    pub g_f: f64,
    pub plain: MonteCarloEstimate,
    pub clustered: MonteCarloEstimate,
    pub plain_theory: BiasVariancePrediction,
    pub clustered_theory: BiasVariancePrediction,
}

impl ClusteredBiasRow {
    pub fn plain_bias(&self) -> f64 {
        self.plain.mean - self.g_tt
    }

    pub fn clustered_bias(&self) -> f64 {
        self.clustered.mean - self.g_f
    }
}

pub fn clustered_bias_study(
    traj: &Trajectory,
    t: f64,
    dt: f64,
    f: &Clustering,
    ns: &[u64],
    replications: usize,
    seed: u64,
) -> Result<Vec<ClusteredBiasRow>> {
    let bracket = Bracket::new(traj, t, dt)?;
    let g_f = bracket.clustered_fisher(traj, f)?;
    ns.iter()
        .enumerate()
        .map(|(i, &n)| {
            let mc = bracket.monte_carlo(n, replications, derive_seed(seed, i as u64), |a, b| {
                vec![fisher_estimate(a, b, dt), clustered_fisher_estimate(a, b, dt, f)]
            })?;
            Ok(ClusteredBiasRow {
                n,
                ell: f.clusters(),
                g_tt: bracket.g_tt,
                g_f,
                plain: mc[0],
                clustered: mc[1],
                plain_theory: fisher_prediction(bracket.g_tt, bracket.p.dof(), n, dt),
                clustered_theory: clustered_fisher_prediction(g_f, f.clusters(), n, dt),
            })
        })
        .collect()
}

/// Residual of the sampled estimator after removing `g_tt` and the leading
/// bias, measured with the control-variate estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderRow {
    pub n: u64,
    pub g_tt: f64,
    pub leading_bias: f64,
    pub mc: MonteCarloEstimate,
    pub predicted: f64,
}

impl SecondOrderRow {
    pub fn residual(&self) -> f64 {
        self.mc.mean - self.g_tt - self.leading_bias
    }
}

pub fn second_order_study(
    traj: &Trajectory,
    t: f64,
    dt: f64,
    ns: &[u64],
    replications: usize,
    seed: u64,
) -> Result<Vec<SecondOrderRow>> {
    let bracket = Bracket::new(traj, t, dt)?;
    let identity = Clustering::identity(bracket.p.len());
    ns.iter()
        .enumerate()
        .map(|(i, &n)| {
            let (tm, tp) = (bracket.minus.probs(), bracket.plus.probs());
            let mc = bracket.monte_carlo(n, replications, derive_seed(seed, i as u64), |a, b| {
                vec![control_variate_fisher(a, b, tm, tp, n, dt, &identity)]
            })?[0];
            Ok(SecondOrderRow {
                n,
                g_tt: bracket.g_tt,
                leading_bias: fisher_bias(bracket.p.dof(), n, dt),
                mc,
                predicted: second_order_correction(&bracket.p, n, dt)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    Variant,
    Cluster,
}

impl RateKind {
    pub fn name(self) -> &'static str {
        match self {
            RateKind::Variant => "variant",
            RateKind::Cluster => "cluster",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoRateRow {
    pub n: u64,
    pub kind: RateKind,
    /// Zero-based variant or cluster index.
    pub index: usize,
    pub exact: f64,
    pub mc: MonteCarloEstimate,
    pub theory_mean: f64,
    pub theory_var: f64,
}

/// Per-variant `İ̂^μ` and per-cluster `𝕀̂̇^a` at `t`.
pub fn info_rate_study(
    traj: &Trajectory,
    t: f64,
    dt: f64,
    f: &Clustering,
    ns: &[u64],
    replications: usize,
    seed: u64,
) -> Result<Vec<InfoRateRow>> {
    let bracket = Bracket::new(traj, t, dt)?;
    let mid = trajectory_at(traj, t)?;
    let q = f.aggregate(mid.p.probs());
    let qdot = f.aggregate(mid.pdot.components());
    let cluster_rates: Vec<f64> = qdot.iter().zip(&q).map(|(a, b)| a / b).collect();
    let m = bracket.p.len();
    let mut rows = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let mc = bracket.monte_carlo(n, replications, derive_seed(seed, i as u64), |a, b| {
            let mut v = info_rate_estimate(a, b, dt);
            v.extend(cluster_info_rate_estimate(a, b, dt, f));
            v
        })?;
        for (j, est) in mc.into_iter().enumerate() {
            let (kind, index, exact, share) = if j < m {
                (RateKind::Variant, j, bracket.rates[j], bracket.p.probs()[j])
            } else {
                (RateKind::Cluster, j - m, cluster_rates[j - m], q[j - m])
            };
            let (theory_mean, theory_var) = match kind {
                RateKind::Variant => info_rate_moments(exact, share, n, dt),
                RateKind::Cluster => cluster_info_rate_moments(exact, share, n, dt),
            };
            rows.push(InfoRateRow {
                n,
                kind,
                index,
                exact,
                mc: est,
                theory_mean,
                theory_var,
            });
        }
    }
    Ok(rows)
}

/// One estimate time in the filtering comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteringPoint {
    pub t: f64,
    pub exact: Vec<f64>,
    pub raw: Vec<f64>,
    /// Plug-in standard deviation of each raw estimate.
    pub raw_sd: Vec<f64>,
    pub filtered: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteringResult {
    pub points: Vec<FilteringPoint>,
    pub rmse_raw: Vec<f64>,
    pub rmse_filtered: Vec<f64>,
}

/// Raw and Gaussian-filtered `İ̂` from one sampled trajectory. Intervals
/// within the kernel half-width of either end are not scored: there the
/// truncated kernel is one-sided and shifts the effective sampling time.
pub fn filtering_study(
    traj: &Trajectory,
    grid: &SampleGrid,
    n: u64,
    seed: u64,
    kernel: &[f64],
) -> Result<FilteringResult> {
    let hw = kernel.len() / 2;
    if grid.intervals() <= 2 * hw {
        return Err(Error::Config(format!(
            "grid has {} intervals; filtering needs more than {} to leave any fully covered",
            grid.intervals(),
            2 * hw
        )));
    }
    let sampled = sample_trajectory(traj, grid, n, seed)?;
    let filtered = filter_trajectory(&sampled, kernel)?;
    let dt = grid.dt();
    let m = sampled.variants();
    let mut points = Vec::new();
    let mut sq_raw = vec![0.0; m];
    let mut sq_filtered = vec![0.0; m];
    for k in hw..grid.intervals() - hw {
        let t = grid.midpoint(k);
        let pt = trajectory_at(traj, t)?;
        let exact = self_information_rate(pt.p, pt.pdot)?;
        let raw = info_rate_hat(&sampled, k)?;
        let smooth = info_rate_hat(&filtered, k)?;
        let (a, b) = (sampled.probs_at(k), sampled.probs_at(k + 1));
        let raw_sd = (0..m)
            .map(|mu| {
                let share = 0.5 * (a[mu] + b[mu]);
                if share > 0.0 {
                    info_rate_moments(raw[mu], share, n, dt).1.max(0.0).sqrt()
                } else {
                    f64::NAN
                }
            })
            .collect();
        for mu in 0..m {
            sq_raw[mu] += (raw[mu] - exact[mu]).powi(2);
            sq_filtered[mu] += (smooth[mu] - exact[mu]).powi(2);
        }
        points.push(FilteringPoint {
            t,
            exact,
            raw,
            raw_sd,
            filtered: smooth,
        });
    }
    let count = points.len() as f64;
    Ok(FilteringResult {
        rmse_raw: sq_raw.iter().map(|s| (s / count).sqrt()).collect(),
        rmse_filtered: sq_filtered.iter().map(|s| (s / count).sqrt()).collect(),
        points,
    })
}

#[derive(Debug, Clone)]
pub struct ElbowResult {
    pub t: f64,
    pub g_tt: f64,
    pub curve: Vec<(usize, f64)>,
    pub clusterings: Vec<Clustering>,
    pub ell_star: usize,
}

/// K-means over `İ` features on `feature_grid` for `ℓ = 1..=ell_max`, with
/// `Δg_tt` evaluated at `t`.
pub fn elbow_study(
    traj: &Trajectory,
    feature_grid: &SampleGrid,
    t: f64,
    ell_max: usize,
    max_iters: usize,
) -> Result<ElbowResult> {
    let features = kmeans_features(traj, feature_grid)?;
    let pt = trajectory_at(traj, t)?;
    let mut curve = Vec::with_capacity(ell_max);
    let mut clusterings = Vec::with_capacity(ell_max);
    for ell in 1..=ell_max {
        let km = kmeans(&features, ell, max_iters)?;
        curve.push((ell, delta_g_prob_form(pt.p, pt.pdot, &km.clustering)?));
        clusterings.push(km.clustering);
    }
    let ell_star = elbow_select(&curve)?;
    Ok(ElbowResult {
        t,
        g_tt: crate::simplex::fisher_information(pt.p, pt.pdot)?,
        curve,
        clusterings,
        ell_star,
    })
}
