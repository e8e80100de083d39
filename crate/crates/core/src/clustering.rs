//! Clustering of degrees of freedom and the information it discards.
//!
//! A surjective map `f: {1..N+1} → {1..ℓ}` induces cluster shares
//! `q^a = Σ_{μ∈𝔸_a} p^μ` and a clustered Fisher information `g^f_tt ≤ g_tt`.
//! The loss `Δg_tt = g_tt − g^f_tt` is the `q`-weighted within-cluster variance
//! of the couplings; it vanishes exactly when every ratio `r^μ = p^μ/q^{f(μ)}`
//! is constant in time (a sufficient statistic).

use std::cmp::Ordering;
use std::io::Write;

use crate::csvfmt::fmt_f64;
use crate::dynamics::{trajectory_at, Trajectory};
use crate::error::{Error, Result};
use crate::sampling::SampleGrid;
use crate::simplex::{Distribution, TangentVector};

/// Second differences at or below this are treated as zero by [`elbow_select`].
pub const ELBOW_TOLERANCE: f64 = 1e-12;

/// A surjective assignment of `N+1` degrees of freedom to `ℓ` clusters.
/// Labels are stored zero-based; CSV output is one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
    clusters: usize,
}

impl Clustering {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::argument("clustering needs at least one degree of freedom"));
        }
        let clusters = labels.iter().max().map(|&m| m + 1).unwrap_or(0);
        let mut seen = vec![false; clusters];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::argument(format!(
                "clustering is not surjective: label {} has no members",
                empty + 1
            )));
        }
        Ok(Clustering { labels, clusters })
    }

    /// Labels in `1..=ℓ`.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::argument("one-based labels must be at least 1"));
        }
        Clustering::new(labels.iter().map(|l| l - 1).collect())
    }

    pub fn identity(len: usize) -> Self {
        Clustering {
            labels: (0..len).collect(),
            clusters: len,
        }
    }

    /// Number of degrees of freedom `N+1`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of clusters `ℓ`.
    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, mu: usize) -> usize {
        self.labels[mu]
    }

    pub fn members(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == a)
            .map(|(mu, _)| mu)
    }

    /// Cluster sums of a per-variant quantity.
    pub fn aggregate(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.labels.len());
        let mut out = vec![0.0; self.clusters];
        for (&l, &v) in self.labels.iter().zip(values) {
            out[l] += v;
        }
        out
    }

    /// True when every cluster of `self` lies inside a cluster of `coarser`.
    pub fn refines(&self, coarser: &Clustering) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut image = vec![None; self.clusters];
        self.labels.iter().zip(&coarser.labels).all(|(&fine, &coarse)| {
            match image[fine] {
                None => {
                    image[fine] = Some(coarse);
                    true
                }
                Some(c) => c == coarse,
            }
        })
    }

    /// Relabels clusters in order of first appearance.
    pub fn canonical(&self) -> Clustering {
        let mut map = vec![usize::MAX; self.clusters];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Clustering {
            labels,
            clusters: self.clusters,
        }
    }

    /// `mu,label` rows (both one-based) with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mu", "label"])?;
        for (mu, &l) in self.labels.iter().enumerate() {
            w.write_record([(mu + 1).to_string(), (l + 1).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_sizes(p: &Distribution, f: &Clustering) -> Result<()> {
    Error::ensure_len(p.len(), f.len())
}

/// Cluster shares `q^a`.
pub fn cluster_probs(p: &Distribution, f: &Clustering) -> Result<Distribution> {
    check_sizes(p, f)?;
    Distribution::new(f.aggregate(p.probs()))
}

/// `g^f_tt = Σ_a (q̇^a)²/q^a`.
pub fn clustered_fisher(p: &Distribution, pdot: &TangentVector, f: &Clustering) -> Result<f64> {
    check_sizes(p, f)?;
    Error::ensure_len(p.len(), pdot.len())?;
    p.require_interior(0.0)?;
    // Summed directly: rebuilding a Distribution could renormalize `q`, and the
    // identity clustering must reproduce `fisher_information` bit for bit.
    let q = f.aggregate(p.probs());
    let qdot = f.aggregate(pdot.components());
    Ok(q.iter().zip(&qdot).map(|(&x, &v)| v * v / x).sum())
}

/// Shares within clusters, `r^μ = p^μ / q^{f(μ)}`.
pub fn within_cluster_shares(p: &Distribution, f: &Clustering) -> Result<Vec<f64>> {
    check_sizes(p, f)?;
    let q = f.aggregate(p.probs());
    Ok(p.probs()
        .iter()
        .zip(f.labels())
        .map(|(x, &l)| x / q[l])
        .collect())
}

/// `Σ_a q^a Var_a(x)` with `Var_a` the `r`-weighted variance inside cluster `a`.
fn weighted_within_variance(p: &Distribution, x: &[f64], f: &Clustering) -> Result<f64> {
    let q = f.aggregate(p.probs());
    let r = within_cluster_shares(p, f)?;
    let mut cluster_mean = vec![0.0; f.clusters()];
    for ((&l, &w), &v) in f.labels().iter().zip(&r).zip(x) {
        cluster_mean[l] += w * v;
    }
    let mut var = vec![0.0; f.clusters()];
    for ((&l, &w), &v) in f.labels().iter().zip(&r).zip(x) {
        let dev = v - cluster_mean[l];
        var[l] += w * dev * dev;
    }
    Ok(q.iter().zip(&var).map(|(a, b)| a * b).sum())
}

/// Information loss from the model alone:
/// `Δg = Σ_a q^a (Σ_{μ∈𝔸_a} r^μ (İ^μ)² − (𝕀̇^a)²)`.
pub fn delta_g_prob_form(p: &Distribution, pdot: &TangentVector, f: &Clustering) -> Result<f64> {
    check_sizes(p, f)?;
    Error::ensure_len(p.len(), pdot.len())?;
    p.require_interior(0.0)?;
    let rates: Vec<f64> = p
        .probs()
        .iter()
        .zip(pdot.components())
        .map(|(x, v)| v / x)
        .collect();
    // The r-weighted mean of İ over a cluster is 𝕀̇^a = q̇^a/q^a.
    weighted_within_variance(p, &rates, f)
}

/// Information loss as the within-cluster variance of the couplings,
/// `Σ_a q^a Var_a(d)`.
pub fn delta_g_coupling_form(p: &Distribution, d: &[f64], f: &Clustering) -> Result<f64> {
    check_sizes(p, f)?;
    Error::ensure_len(p.len(), d.len())?;
    p.require_interior(0.0)?;
    weighted_within_variance(p, d, f)
}

/// Cluster couplings `𝔡^a = Σ_{μ∈𝔸_a} r^μ d^μ`.
pub fn cluster_couplings(p: &Distribution, d: &[f64], f: &Clustering) -> Result<Vec<f64>> {
    let r = within_cluster_shares(p, f)?;
    Error::ensure_len(p.len(), d.len())?;
    let mut out = vec![0.0; f.clusters()];
    for ((&l, &w), &v) in f.labels().iter().zip(&r).zip(d) {
        out[l] += w * v;
    }
    Ok(out)
}

/// Largest centered finite-difference rate `|dr^μ/dt|` over the fine grid.
/// Zero (to discretization accuracy) identifies a sufficient statistic.
pub fn sufficiency_residuals(traj: &Trajectory, f: &Clustering) -> Result<f64> {
    Error::ensure_len(traj.variants(), f.len())?;
    let shares = traj
        .probabilities()
        .iter()
        .map(|p| within_cluster_shares(p, f))
        .collect::<Result<Vec<_>>>()?;
    let h = traj.step();
    let mut worst = 0.0f64;
    for k in 1..shares.len().saturating_sub(1) {
        for mu in 0..f.len() {
            let rate = (shares[k + 1][mu] - shares[k - 1][mu]) / (2.0 * h);
            worst = worst.max(rate.abs());
        }
    }
    Ok(worst)
}

/// Feature rows for K-means: row `μ` is `(İ^μ(t))` over the grid instants.
pub fn kmeans_features(traj: &Trajectory, grid: &SampleGrid) -> Result<Vec<Vec<f64>>> {
    let columns = grid
        .times()
        .map(|t| {
            let k = traj.index_of(t)?;
            Ok(traj.info_rate_at_index(k))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(transpose(&columns))
}

/// Feature rows from the instantaneous rates at a single time.
pub fn point_features(traj: &Trajectory, t: f64) -> Result<Vec<Vec<f64>>> {
    let pt = trajectory_at(traj, t)?;
    let k = traj.index_of(pt.time)?;
    Ok(traj.info_rate_at_index(k).into_iter().map(|x| vec![x]).collect())
}

/// Turns per-time rate vectors (e.g. sampled or filtered `İ̂`) into per-variant rows.
pub fn transpose(by_time: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if by_time.is_empty() {
        return Vec::new();
    }
    let m = by_time[0].len();
    (0..m).map(|mu| by_time.iter().map(|row| row[mu]).collect()).collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Leading principal direction of the centered rows, by power iteration.
fn principal_direction(rows: &[Vec<f64>]) -> Vec<f64> {
    let dim = rows[0].len();
    let m = rows.len() as f64;
    let mean: Vec<f64> = (0..dim).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m).collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(x, c)| x - c).collect())
        .collect();
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for row in &centered {
            let s: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            for (o, x) in out.iter_mut().zip(row) {
                *o += s * x;
            }
        }
        out
    };
    let normalize = |v: &mut Vec<f64>| -> f64 {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        norm
    };
    let starts = std::iter::once(vec![1.0; dim]).chain((0..dim).map(|j| {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        e
    }));
    for mut v in starts {
        normalize(&mut v);
        let mut ok = false;
        for _ in 0..500 {
            let mut next = apply(&v);
            if normalize(&mut next) == 0.0 {
                break;
            }
            ok = true;
            let change = sq_dist(&next, &v);
            v = next;
            if change < 1e-28 {
                break;
            }
        }
        if ok {
            // Sign fixed by the largest component so the direction depends only on content.
            if let Some(big) = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())) {
                if big < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            return v;
        }
    }
    vec![0.0; dim]
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Outcome of [`kmeans`].
#[derive(Debug, Clone)]
pub struct KMeans {
    pub clustering: Clustering,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares after each assignment step, then after
    /// the final centroid update.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

impl KMeans {
    pub fn objective(&self) -> f64 {
        *self.objective_history.last().unwrap_or(&0.0)
    }
}

/// Lloyd's algorithm with deterministic quantile seeding along the first
/// principal direction: centroid `a` starts at the row sitting at quantile
/// `(a + 1/2)/ℓ` of the projections. A cluster that empties is re-seeded at
/// the point farthest from its centroid.
pub fn kmeans(features: &[Vec<f64>], ell: usize, max_iters: usize) -> Result<KMeans> {
    let m = features.len();
    if m == 0 {
        return Err(Error::argument("kmeans needs at least one feature row"));
    }
    if ell == 0 || ell > m {
        return Err(Error::argument(format!("cluster count {ell} must be in 1..={m}")));
    }
    if max_iters == 0 {
        return Err(Error::argument("max_iters must be at least 1"));
    }
    let dim = features[0].len();
    for row in features {
        Error::ensure_len(dim, row.len())?;
    }

    let direction = principal_direction(features);
    let projection: Vec<f64> = features
        .iter()
        .map(|r| r.iter().zip(&direction).map(|(a, b)| a * b).sum())
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        projection[a]
            .total_cmp(&projection[b])
            .then_with(|| lexicographic(&features[a], &features[b]))
    });
    let mut centroids: Vec<Vec<f64>> = (0..ell)
        .map(|a| {
            let q = (a as f64 + 0.5) / ell as f64;
            let idx = ((q * m as f64).floor() as usize).min(m - 1);
            features[order[idx]].clone()
        })
        .collect();

    let mut assignment = vec![usize::MAX; m];
    let mut history = Vec::new();
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        let mut next: Vec<usize> = features
            .iter()
            .map(|x| {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (a, c) in centroids.iter().enumerate() {
                    let d = sq_dist(x, c);
                    if d < best_d {
                        best = a;
                        best_d = d;
                    }
                }
                best
            })
            .collect();
        reseed_empty(features, &mut centroids, &mut next, ell);
        history.push(objective(features, &centroids, &next));
        let converged = next == assignment;
        assignment = next;
        centroids = update_centroids(features, &assignment, ell, &centroids);
        if converged {
            break;
        }
    }
    history.push(objective(features, &centroids, &assignment));
    let clustering = Clustering::new(assignment)?.canonical();
    Ok(KMeans {
        clustering,
        centroids,
        objective_history: history,
        iterations,
    })
}

fn objective(features: &[Vec<f64>], centroids: &[Vec<f64>], assignment: &[usize]) -> f64 {
    features
        .iter()
        .zip(assignment)
        .map(|(x, &a)| sq_dist(x, &centroids[a]))
        .sum()
}

fn reseed_empty(features: &[Vec<f64>], centroids: &mut [Vec<f64>], assignment: &mut [usize], ell: usize) {
    loop {
        let mut sizes = vec![0usize; ell];
        for &a in assignment.iter() {
            sizes[a] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        // Farthest point among clusters that can spare one; ties to the lowest index.
        let mut pick = None;
        let mut pick_d = -1.0;
        for (i, x) in features.iter().enumerate() {
            let a = assignment[i];
            if sizes[a] < 2 {
                continue;
            }
            let d = sq_dist(x, &centroids[a]);
            if d > pick_d {
                pick = Some(i);
                pick_d = d;
            }
        }
        let i = pick.expect("ell <= rows guarantees a cluster with spare members");
        assignment[i] = empty;
        centroids[empty] = features[i].clone();
    }
}

fn update_centroids(
    features: &[Vec<f64>],
    assignment: &[usize],
    ell: usize,
    previous: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let dim = features[0].len();
    let mut sums = vec![vec![0.0; dim]; ell];
    let mut sizes = vec![0usize; ell];
    for (x, &a) in features.iter().zip(assignment) {
        sizes[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(x) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(&sizes)
        .enumerate()
        .map(|(a, (s, &n))| {
            if n == 0 {
                previous[a].clone()
            } else {
                s.into_iter().map(|v| v / n as f64).collect()
            }
        })
        .collect()
}

/// Elbow of an information-loss curve `(ℓ, Δg_tt)`: the interior `ℓ` with
/// the largest second difference of `Δg_tt` (equivalently the most negative
/// second difference of `−Δg_tt`). Ties go to the smaller `ℓ`.
pub fn elbow_select(curve: &[(usize, f64)]) -> Result<usize> {
    if curve.len() < 4 {
        return Err(Error::argument(format!(
            "elbow selection needs at least 4 points, got {}",
            curve.len()
        )));
    }
    if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::argument("cluster counts must be strictly increasing"));
    }
    let mut best: Option<(usize, f64)> = None;
    for w in curve.windows(3) {
        let (x0, y0) = (w[0].0 as f64, w[0].1);
        let (x1, y1) = (w[1].0 as f64, w[1].1);
        let (x2, y2) = (w[2].0 as f64, w[2].1);
        // Divided second difference, equal to y2 − 2y1 + y0 on a unit grid.
        let second = 2.0 * ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (x2 - x0);
        if best.is_none_or(|(_, b)| second > b) {
            best = Some((w[1].0, second));
        }
    }
    match best {
        Some((ell, second)) if second > ELBOW_TOLERANCE => Ok(ell),
        _ => Err(Error::NoElbow),
    }
}

/// `ell,delta_g` rows with a header.
pub fn write_delta_curve_csv<W: Write>(out: W, curve: &[(usize, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ell", "delta_g"])?;
    for &(ell, dg) in curve {
        w.write_record([ell.to_string(), fmt_f64(dg)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_sir, replicator_velocity, SirParams};
    use crate::simplex::fisher_information;
    use proptest::prelude::*;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn construction_checks_surjectivity() {
        assert!(Clustering::new(vec![0, 2, 2]).is_err());
        assert!(Clustering::from_one_based(&[0, 1]).is_err());
        let f = Clustering::from_one_based(&[1, 1, 2, 2]).unwrap();
        assert_eq!(f.clusters(), 2);
        assert_eq!(f.members(1).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn cluster_probs_examples() {
        let p = dist(&[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(cluster_probs(&p, &Clustering::identity(4)).unwrap(), p);
        assert_eq!(cluster_probs(&p, &Clustering::new(vec![0; 4]).unwrap()).unwrap().probs(), &[1.0]);
        let q = cluster_probs(&p, &Clustering::from_one_based(&[1, 1, 2, 2]).unwrap()).unwrap();
        assert!((q.probs()[0] - 0.3).abs() < 1e-15 && (q.probs()[1] - 0.7).abs() < 1e-15);
        assert!(cluster_probs(&p, &Clustering::identity(3)).is_err());
    }

    #[test]
    fn clustered_fisher_limits() {
        let p = dist(&[0.1, 0.2, 0.3, 0.4]);
        let v = replicator_velocity(&p, &[1.0, -0.5, 0.3, 2.0]).unwrap();
        let g = fisher_information(&p, &v).unwrap();
        assert_eq!(clustered_fisher(&p, &v, &Clustering::identity(4)).unwrap(), g);
        assert_eq!(clustered_fisher(&p, &v, &Clustering::new(vec![0; 4]).unwrap()).unwrap(), 0.0);
        assert_eq!(delta_g_prob_form(&p, &v, &Clustering::identity(4)).unwrap(), 0.0);
    }

    #[test]
    fn piecewise_constant_couplings_are_sufficient() {
        let p = dist(&[0.1, 0.2, 0.3, 0.4]);
        let d = [1.5, 1.5, -0.25, -0.25];
        let f = Clustering::new(vec![0, 0, 1, 1]).unwrap();
        let v = replicator_velocity(&p, &d).unwrap();
        let g = fisher_information(&p, &v).unwrap();
        let gf = clustered_fisher(&p, &v, &f).unwrap();
        assert!((g - gf).abs() <= 1e-12 * g);
        assert!(delta_g_prob_form(&p, &v, &f).unwrap() < 1e-12);
        assert!(delta_g_coupling_form(&p, &d, &f).unwrap() < 1e-12);
    }

    #[test]
    fn coupling_form_is_shift_invariant() {
        let p = dist(&[0.15, 0.25, 0.6]);
        let f = Clustering::new(vec![0, 0, 1]).unwrap();
        assert_eq!(delta_g_coupling_form(&p, &[0.7; 3], &f).unwrap(), 0.0);
        let d = [0.3, -0.9, 0.1];
        let base = delta_g_coupling_form(&p, &d, &f).unwrap();
        let shifted: Vec<f64> = d.iter().map(|x| x + 0.125).collect();
        let moved = delta_g_coupling_form(&p, &shifted, &f).unwrap();
        assert!((base - moved).abs() <= 1e-15 * base.max(1.0));
    }

    #[test]
    fn sufficiency_of_symmetric_model() {
        let params = SirParams {
            gamma: vec![2.0, 2.0, 1.6, 1.6],
            epsilon: vec![1.0, 1.0, 0.9, 0.9],
            s0: 0.95,
            i0: vec![0.01, 0.02, 0.005, 0.015],
            r0: 0.0,
        };
        let traj = integrate_sir(&params, 5.0, 1e-3).unwrap();
        let id = Clustering::identity(4);
        assert_eq!(sufficiency_residuals(&traj, &id).unwrap(), 0.0);
        let f = Clustering::new(vec![0, 0, 1, 1]).unwrap();
        assert!(sufficiency_residuals(&traj, &f).unwrap() < 1e-8);
        let g = Clustering::new(vec![0, 1, 0, 1]).unwrap();
        assert!(sufficiency_residuals(&traj, &g).unwrap() > 1e-3);
        let k = traj.index_of(2.0).unwrap();
        let loss = delta_g_prob_form(&traj.probabilities()[k], &traj.velocities()[k], &g).unwrap();
        assert!(loss > 0.0);
    }

    #[test]
    fn features_of_stationary_model_vanish() {
        let params = SirParams {
            gamma: vec![2.0; 3],
            epsilon: vec![1.0; 3],
            s0: 0.9,
            i0: vec![0.05, 0.03, 0.02],
            r0: 0.0,
        };
        let traj = integrate_sir(&params, 4.0, 1e-2).unwrap();
        let grid = SampleGrid::new(0.5, 0.5, 6).unwrap();
        let rows = kmeans_features(&traj, &grid).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().flatten().all(|x| x.abs() < 1e-15));
        let single = point_features(&traj, 1.0).unwrap();
        assert!(single.iter().all(|r| r.len() == 1));
    }

    #[test]
    fn kmeans_identity_when_ell_is_full() {
        let rows: Vec<Vec<f64>> = [0.3, -1.0, 2.0, 0.9, 5.0].iter().map(|&x| vec![x, x * x]).collect();
        let km = kmeans(&rows, 5, 10).unwrap();
        assert_eq!(km.clustering.clusters(), 5);
        assert!(km.objective() < 1e-30);
    }

    #[test]
    fn kmeans_separated_scalars() {
        let rows = vec![vec![0.0], vec![5.0], vec![0.1], vec![5.1]];
        let km = kmeans(&rows, 2, 20).unwrap();
        assert_eq!(km.clustering.labels(), &[0, 1, 0, 1]);
    }

    #[test]
    fn kmeans_recovers_six_groups() {
        // Group centres 1 apart, spread 0.05: separation 20x the spread.
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for g in 0..6 {
            for j in 0..4 {
                let jitter = 0.05 * (j as f64 / 3.0 - 0.5);
                rows.push(vec![g as f64 + jitter, (g as f64 * 0.7).sin() - jitter]);
                truth.push(g);
            }
        }
        let km = kmeans(&rows, 6, 100).unwrap();
        assert_eq!(km.clustering, Clustering::new(truth).unwrap().canonical());
    }

    #[test]
    fn kmeans_handles_duplicates_without_empty_clusters() {
        let rows = vec![vec![1.0]; 4];
        let km = kmeans(&rows, 3, 10).unwrap();
        assert_eq!(km.clustering.clusters(), 3);
        assert!(kmeans(&rows, 5, 10).is_err());
        assert!(kmeans(&rows, 2, 0).is_err());
    }

    #[test]
    fn elbow_examples() {
        let kink: Vec<(usize, f64)> = (1..=10)
            .map(|l| (l, if l <= 6 { 1.0 - 0.15 * l as f64 } else { 0.1 - 0.01 * (l - 6) as f64 }))
            .collect();
        assert_eq!(elbow_select(&kink).unwrap(), 6);
        let line: Vec<(usize, f64)> = (1..=8).map(|l| (l, 2.0 - 0.25 * l as f64)).collect();
        assert!(matches!(elbow_select(&line), Err(Error::NoElbow)));
        assert!(elbow_select(&line[..3]).is_err());
        let mut bad = line.clone();
        bad.swap(1, 2);
        assert!(elbow_select(&bad).is_err());
    }

    #[test]
    fn csv_layouts() {
        let f = Clustering::from_one_based(&[2, 1, 2]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "mu,label\n1,2\n2,1\n3,2\n");
        let mut buf = Vec::new();
        write_delta_curve_csv(&mut buf, &[(1, 0.5)]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "ell,delta_g\n1,5.0000000000000000e-1\n");
    }

    fn instance(m: usize) -> impl Strategy<Value = (Distribution, Vec<f64>, Vec<usize>)> {
        (
            prop::collection::vec(0.02f64..1.0, m),
            prop::collection::vec(-2.0f64..2.0, m),
            prop::collection::vec(0usize..3, m),
        )
            .prop_map(|(w, d, labels)| (Distribution::from_weights(&w).unwrap(), d, labels))
    }

    fn surjective(labels: Vec<usize>) -> Clustering {
        // Compress used labels onto 0..ℓ.
        let mut used: Vec<usize> = labels.clone();
        used.sort_unstable();
        used.dedup();
        Clustering::new(labels.iter().map(|l| used.binary_search(l).unwrap()).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn kmeans_objective_never_increases(rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 4..20), ell in 1usize..4) {
            let km = kmeans(&rows, ell.min(rows.len()), 50).unwrap();
            for w in km.objective_history.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
            }
        }

        #[test]
        fn kmeans_ignores_row_order(rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 5..12), ell in 1usize..4, rot in 0usize..12) {
            let a = kmeans(&rows, ell, 100).unwrap().clustering;
            let shift = rot % rows.len();
            let mut perm_rows = rows.clone();
            perm_rows.rotate_left(shift);
            let b = kmeans(&perm_rows, ell, 100).unwrap().clustering;
            // Undo the rotation and compare partitions.
            let m = rows.len();
            let back: Vec<usize> = (0..m).map(|i| b.label((i + m - shift) % m)).collect();
            prop_assert_eq!(Clustering::new(back).unwrap().canonical(), a.canonical());
        }

        #[test]
        fn clustered_fisher_is_bounded((p, d, labels) in instance(6)) {
            let f = surjective(labels);
            let v = replicator_velocity(&p, &d).unwrap();
            let g = fisher_information(&p, &v).unwrap();
            let gf = clustered_fisher(&p, &v, &f).unwrap();
            prop_assert!(gf >= 0.0 && gf <= g * (1.0 + 1e-12));
        }
    }
}
