//! Config-driven experiment runner.
//!
//! [`run`] reads a [`Config`], executes the named experiment, writes its CSV
//! artifacts into an output directory and records them in `manifest.json`
//! together with the SHA-256 of the config text and the seed. Output bytes
//! depend only on the config and the seed, not on the thread count.
//!
//! | experiment | artifacts |
//! |---|---|
//! | `distance-moments` | `distance_moments.csv` |
//! | `model-trajectory` | `trajectory.csv`, `information.csv`, `clustering.csv`, `report.csv` |
//! | `info-rate-moments` | `info_rate_moments.csv`, `clustering.csv` |
//! | `fisher-bias-vs-n` | `fisher_bias_vs_n.csv` |
//! | `fisher-bias-vs-t` | `fisher_bias_vs_t.csv` |
//! | `filtering-comparison` | `filtering.csv`, `filtering_rmse.csv`, `samples.csv` |
//! | `elbow-scan` | `delta_curve.csv`, `clusterings.csv`, `report.csv` |
//! | `theory-vs-mc` | `theory_vs_mc.csv`, `estimates.csv`, `clustering.csv` |

pub mod config;
pub mod studies;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clustering::{kmeans, kmeans_features, sufficiency_residuals, Clustering};
use crate::csvfmt::fmt_f64;
use crate::dynamics::{SirParams, Trajectory, DESK_S0};
use crate::error::{Error, Result};
use crate::filtering::{gaussian_kernel, DEFAULT_HALF_WIDTH, DEFAULT_SHAPE};
use crate::sampling::{sample_trajectory, write_estimates_csv, MonteCarloEstimate, SampleGrid};
use crate::simplex::{fisher_information, self_information_rate, Distribution};

pub use config::{Config, ExperimentKind};
use studies::*;

const DEFAULT_VARIANTS: usize = 10;
const KMEANS_ITERS: usize = 300;

/// One output file, held in memory until it is written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub config_sha256: String,
    pub seed: u64,
    pub artifacts: Vec<ArtifactRecord>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn table<S: AsRef<str>>(header: &[S], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn artifact(file: &str, bytes: Vec<u8>) -> Artifact {
    Artifact {
        file: file.to_string(),
        bytes,
    }
}

fn with_writer<F>(file: &str, write: F) -> Result<Artifact>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut bytes = Vec::new();
    write(&mut bytes)?;
    Ok(artifact(file, bytes))
}

/// Evenly spaced instants from `t0` to `t_end` inclusive.
fn span_grid(t0: f64, t_end: f64, dt: f64) -> Result<SampleGrid> {
    let steps = (t_end - t0) / dt;
    let count = steps.round();
    if !(count >= 1.0) || (steps - count).abs() > 1e-9 * steps.max(1.0) {
        return Err(Error::Config(format!(
            "t_end - t0 = {} must be a positive multiple of dt = {dt}",
            t_end - t0
        )));
    }
    SampleGrid::new(t0, dt, count as usize + 1)
}

/// Model rates from `N`, `gamma`, `epsilon` and `s0`, falling back to the
/// desk defaults.
pub fn model_params(cfg: &Config) -> Result<SirParams> {
    let gamma = cfg.list::<f64>("gamma")?;
    let epsilon = cfg.list::<f64>("epsilon")?;
    let explicit: Option<usize> = cfg.get::<usize>("N")?.map(|n| n + 1);
    let from_lists = gamma.as_ref().or(epsilon.as_ref()).map(|v| v.len());
    let variants = match (explicit, from_lists) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config(format!(
                "N = {} implies {a} variants but the rate list has {b}",
                a - 1
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => DEFAULT_VARIANTS,
    };
    if variants < 2 {
        return Err(Error::Config("need at least 2 variants (N >= 1)".into()));
    }
    let s0 = cfg.get_or("s0", DESK_S0)?;
    if !(s0 > 0.0 && s0 < 1.0) {
        return Err(Error::Config(format!("s0 must lie in (0, 1), got {s0}")));
    }
    let mut params = SirParams::desk_default(variants);
    params.s0 = s0;
    params.i0 = vec![(1.0 - s0) / variants as f64; variants];
    for (key, list, slot) in [("gamma", gamma, &mut params.gamma), ("epsilon", epsilon, &mut params.epsilon)] {
        if let Some(values) = list {
            if values.len() != variants {
                return Err(Error::Config(format!(
                    "'{key}' has {} entries; expected {variants}",
                    values.len()
                )));
            }
            *slot = values;
        }
    }
    params
        .validate()
        .map_err(|e| Error::Config(format!("invalid model rates: {e}")))?;
    Ok(params)
}

fn fine_step(cfg: &Config, dt: f64) -> Result<f64> {
    let step = cfg.positive("fine_step", dt / 250.0)?;
    let ratio = 0.5 * dt / step;
    if (ratio - ratio.round()).abs() > 1e-6 || ratio.round() < 1.0 {
        return Err(Error::Config(format!(
            "fine_step {step} must divide dt/2 = {} so sampling instants fall on the integration grid",
            0.5 * dt
        )));
    }
    Ok(step)
}

fn estimate_time(cfg: &Config, dt: f64) -> Result<f64> {
    let t = cfg.get_or("t", 5.0)?;
    if !(t - 0.5 * dt >= 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("t = {t} must be at least dt/2 = {}", 0.5 * dt)));
    }
    Ok(t)
}

/// Clustering used by the experiments that need one: `ell` from the config,
/// or K-means with `ell` clusters on `İ` features over `[0, t_end]`.
fn feature_clustering(cfg: &Config, traj: &Trajectory, dt: f64, t_end: f64) -> Result<Clustering> {
    let ell = cfg.count_at_least("ell", 3, 1)?;
    if ell > traj.variants() {
        return Err(Error::Config(format!(
            "ell = {ell} exceeds the {} variants",
            traj.variants()
        )));
    }
    let grid = span_grid(0.0, t_end, dt)?;
    Ok(kmeans(&kmeans_features(traj, &grid)?, ell, KMEANS_ITERS)?.clustering)
}

fn clustering_artifact(f: &Clustering) -> Result<Artifact> {
    with_writer("clustering.csv", |w| f.write_csv(w))
}

fn distance_artifact(rows: &[DistanceRow]) -> Result<Artifact> {
    let body = rows.iter().map(|r| {
        vec![
            r.n.to_string(),
            fmt_f64(r.mc.mean),
            fmt_f64(r.mc.standard_error),
            fmt_f64(r.mc.variance()),
            fmt_f64(r.theory_mean),
            fmt_f64(r.theory_var),
        ]
    });
    Ok(artifact(
        "distance_moments.csv",
        table(&["n", "mc_mean", "mc_se", "mc_var", "theory_mean", "theory_var"], body)?,
    ))
}

fn distance_distribution(cfg: &Config) -> Result<Distribution> {
    match cfg.list::<f64>("p")? {
        Some(p) => Distribution::new(p).map_err(|e| Error::Config(format!("'p' is not a distribution: {e}"))),
        None => {
            // p^μ ∝ μ; for N = 3 this is (0.1, 0.2, 0.3, 0.4).
            let outcomes = cfg.get_or::<usize>("N", 3)? + 1;
            let weights: Vec<f64> = (1..=outcomes).map(|k| k as f64).collect();
            Distribution::from_weights(&weights)
        }
    }
}

fn run_distance(cfg: &Config, seed: u64) -> Result<Vec<Artifact>> {
    let p = distance_distribution(cfg)?;
    let ns = cfg.sample_sizes(vec![100, 1000, 10_000])?;
    let r = cfg.count_at_least("replications", 2000, 2)?;
    Ok(vec![distance_artifact(&distance_study(&p, &ns, r, seed)?)?])
}

fn run_model(cfg: &Config) -> Result<Vec<Artifact>> {
    let params = model_params(cfg)?;
    let dt = cfg.positive("dt", 0.25)?;
    let t_end = cfg.positive("t_end", 10.0)?;
    let traj = integrate_until(&params, t_end, fine_step(cfg, dt)?)?;
    let f = feature_clustering(cfg, &traj, dt, t_end)?;
    let grid = span_grid(0.0, t_end, dt)?;
    let m = traj.variants();
    let mut header = vec!["t".to_string(), "g_tt".into(), "g_f".into(), "delta_g".into()];
    header.extend((1..=m).map(|k| format!("idot_{k}")));
    let mut rows = Vec::with_capacity(grid.count());
    for t in grid.times() {
        let pt = crate::dynamics::trajectory_at(&traj, t)?;
        let g = fisher_information(pt.p, pt.pdot)?;
        let g_f = crate::clustering::clustered_fisher(pt.p, pt.pdot, &f)?;
        let mut row = vec![fmt_f64(pt.time), fmt_f64(g), fmt_f64(g_f), fmt_f64(g - g_f)];
        row.extend(self_information_rate(pt.p, pt.pdot)?.into_iter().map(fmt_f64));
        rows.push(row);
    }
    let report = table(
        &["key", "value"],
        [
            vec!["ell".into(), f.clusters().to_string()],
            vec!["sufficiency_residual".into(), fmt_f64(sufficiency_residuals(&traj, &f)?)],
        ],
    )?;
    Ok(vec![
        with_writer("trajectory.csv", |w| traj.write_csv(w))?,
        artifact("information.csv", table(&header, rows)?),
        clustering_artifact(&f)?,
        artifact("report.csv", report),
    ])
}

fn estimate_setup(cfg: &Config, t_default_end: f64) -> Result<(Trajectory, f64, f64, f64)> {
    let params = model_params(cfg)?;
    let dt = cfg.positive("dt", 0.25)?;
    let t = estimate_time(cfg, dt)?;
    let t_end = cfg.positive("t_end", t_default_end.max(t + 0.5 * dt))?;
    if t_end < t + 0.5 * dt {
        return Err(Error::Config(format!(
            "t_end = {t_end} must reach t + dt/2 = {}",
            t + 0.5 * dt
        )));
    }
    let traj = integrate_until(&params, t_end, fine_step(cfg, dt)?)?;
    Ok((traj, dt, t, t_end))
}

fn run_info_rates(cfg: &Config, seed: u64) -> Result<Vec<Artifact>> {
    let (traj, dt, t, t_end) = estimate_setup(cfg, 10.0)?;
    let f = feature_clustering(cfg, &traj, dt, t_end)?;
    let ns = cfg.sample_sizes(vec![1000, 10_000, 100_000])?;
    let r = cfg.count_at_least("replications", 1000, 2)?;
    let rows = info_rate_study(&traj, t, dt, &f, &ns, r, seed)?;
    let body = rows.iter().map(|r| {
        vec![
            r.n.to_string(),
            r.kind.name().to_string(),
            (r.index + 1).to_string(),
            fmt_f64(r.exact),
            fmt_f64(r.mc.mean),
            fmt_f64(r.mc.standard_error),
            fmt_f64(r.mc.variance()),
            fmt_f64(r.theory_mean),
            fmt_f64(r.theory_var),
        ]
    });
    let header = ["n", "kind", "index", "exact", "mc_mean", "mc_se", "mc_var", "theory_mean", "theory_var"];
    Ok(vec![
        artifact("info_rate_moments.csv", table(&header, body)?),
        clustering_artifact(&f)?,
    ])
}

fn bias_rows(rows: &[FisherBiasRow], by_time: bool) -> Result<Vec<u8>> {
    let body = rows.iter().map(|r| {
        let mut row = Vec::with_capacity(6);
        if by_time {
            row.push(fmt_f64(r.t));
            row.push(fmt_f64(r.g_tt));
        } else {
            row.push(r.n.to_string());
        }
        row.extend([
            fmt_f64(r.mc.mean),
            fmt_f64(r.mc.standard_error),
            fmt_f64(r.theory.expected_value),
            fmt_f64(r.theory.sd()),
        ]);
        row
    });
    if by_time {
        table(&["t", "g_tt", "mc_mean", "mc_se", "theory_mean", "theory_sd"], body)
    } else {
        table(&["n", "mc_mean", "mc_se", "theory_mean", "theory_sd"], body)
    }
}

fn run_bias_vs_n(cfg: &Config, seed: u64) -> Result<Vec<Artifact>> {
    let (traj, dt, t, _) = estimate_setup(cfg, 0.0)?;
    let ns = cfg.sample_sizes(vec![10_000, 30_000, 100_000])?;
    let r = cfg.count_at_least("replications", 500, 2)?;
    let rows = fisher_bias_vs_n(&traj, t, dt, &ns, r, seed)?;
    Ok(vec![artifact("fisher_bias_vs_n.csv", bias_rows(&rows, false)?)])
}

fn single_n(cfg: &Config, default: u64) -> Result<u64> {
    match cfg.sample_sizes(vec![default])?.as_slice() {
        [n] => Ok(*n),
        more => Err(Error::Config(format!(
            "this experiment takes a single sample size, got {} values for 'n'",
            more.len()
        ))),
    }
}

fn run_bias_vs_t(cfg: &Config, seed: u64) -> Result<Vec<Artifact>> {
    let params = model_params(cfg)?;
    let dt = cfg.positive("dt", 0.25)?;
    let t0 = cfg.get_or("t0", 0.0)?;
    let t_end = cfg.positive("t_end", 10.0)?;
    if t0 < 0.0 {
        return Err(Error::Config(format!("t0 must be nonnegative, got {t0}")));
    }
    let grid = span_grid(t0, t_end, dt)?;
    let traj = integrate_until(&params, t_end, fine_step(cfg, dt)?)?;
    let n = single_n(cfg, 10_000)?;
    let r = cfg.count_at_least("replications", 500, 2)?;
    let rows = fisher_bias_vs_t(&traj, &grid, n, r, seed)?;
    Ok(vec![artifact("fisher_bias_vs_t.csv", bias_rows(&rows, true)?)])
}

fn run_filtering(cfg: &Config, seed: u64) -> Result<Vec<Artifact>> {
    let params = model_params(cfg)?;
    let dt = cfg.positive("dt", 0.25)?;
    let t0 = cfg.get_or("t0", 0.0)?;
    let t_end = cfg.positive("t_end", 10.0)?;
    if t0 < 0.0 {
        return Err(Error::Config(format!("t0 must be nonnegative, got {t0}")));
    }
    let grid = span_grid(t0, t_end, dt)?;
    let traj = integrate_until(&params, t_end, fine_step(cfg, dt)?)?;
    let n = single_n(cfg, 250_000)?;
    let hw = cfg.get_or("half_width", DEFAULT_HALF_WIDTH)?;
    let kernel = gaussian_kernel(hw, cfg.positive("shape", DEFAULT_SHAPE)?)?;
    let result = filtering_study(&traj, &grid, n, seed, &kernel)?;
    let mut rows = Vec::new();
    for point in &result.points {
        for mu in 0..point.exact.len() {
            rows.push(vec![
                fmt_f64(point.t),
                (mu + 1).to_string(),
                fmt_f64(point.exact[mu]),
                fmt_f64(point.raw[mu]),
                fmt_f64(point.raw_sd[mu]),
                fmt_f64(point.filtered[mu]),
            ]);
        }
    }
    let rmse = result
        .rmse_raw
        .iter()
        .zip(&result.rmse_filtered)
        .enumerate()
        .map(|(mu, (a, b))| vec![(mu + 1).to_string(), fmt_f64(*a), fmt_f64(*b)]);
    let sampled = sample_trajectory(&traj, &grid, n, seed)?;
    Ok(vec![
        artifact(
            "filtering.csv",
            table(&["t", "mu", "exact", "raw", "raw_sd", "filtered"], rows)?,
        ),
        artifact("filtering_rmse.csv", table(&["mu", "rmse_raw", "rmse_filtered"], rmse)?),
        with_writer("samples.csv", |w| sampled.write_csv(w))?,
    ])
}

fn run_elbow(cfg: &Config) -> Result<Vec<Artifact>> {
    let dt = cfg.positive("dt", 0.25)?;
    let t = cfg.get_or("t", 1.0)?;
    let t_end = cfg.positive("t_end", 8.0)?;
    let params = if cfg.contains("gamma") || cfg.contains("epsilon") || cfg.contains("N") {
        model_params(cfg)?
    } else {
        six_group_model(t)?
    };
    let ell_max = cfg.count_at_least("ell_max", 10, 4)?;
    if ell_max > params.variants() {
        return Err(Error::Config(format!(
            "ell_max = {ell_max} exceeds the {} variants",
            params.variants()
        )));
    }
    let traj = integrate_until(&params, t_end.max(t), fine_step(cfg, dt)?)?;
    let grid = span_grid(cfg.get_or("t0", 0.0)?, t_end, dt)?;
    let max_iters = cfg.count_at_least("max_iters", KMEANS_ITERS, 1)?;
    let result = elbow_study(&traj, &grid, t, ell_max, max_iters)?;
    let delta = with_writer("delta_curve.csv", |w| {
        crate::clustering::write_delta_curve_csv(w, &result.curve)
    })?;
    let mut header = vec!["mu".to_string()];
    header.extend(result.curve.iter().map(|(ell, _)| format!("ell_{ell}")));
    let labels = (0..params.variants()).map(|mu| {
        let mut row = vec![(mu + 1).to_string()];
        row.extend(result.clusterings.iter().map(|f| (f.label(mu) + 1).to_string()));
        row
    });
    let report = table(
        &["key", "value"],
        [
            vec!["t".into(), fmt_f64(result.t)],
            vec!["g_tt".into(), fmt_f64(result.g_tt)],
            vec!["ell_star".into(), result.ell_star.to_string()],
        ],
    )?;
    Ok(vec![
        delta,
        artifact("clusterings.csv", table(&header, labels)?),
        artifact("report.csv", report),
    ])
}

fn run_theory_vs_mc(cfg: &Config, seed: u64) -> Result<Vec<Artifact>> {
    let (traj, dt, t, t_end) = estimate_setup(cfg, 10.0)?;
    let f = feature_clustering(cfg, &traj, dt, t_end)?;
    let ns = cfg.sample_sizes(vec![1000, 10_000])?;
    let r = cfg.count_at_least("replications", 2000, 2)?;
    let p = distance_distribution(cfg)?;
    let seeds: Vec<u64> = (0..5).map(|k| crate::rng::derive_seed(seed, k)).collect();

    let distance = distance_study(&p, &ns, r, seeds[0])?;
    let clustered = clustered_bias_study(&traj, t, dt, &f, &ns, r, seeds[1])?;
    let second = second_order_study(&traj, t, dt, &ns, r, seeds[2])?;
    let rates = info_rate_study(&traj, t, dt, &f, &ns, r, seeds[3])?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut estimates: Vec<(String, MonteCarloEstimate)> = Vec::new();
    let mut push = |quantity: &str, n: u64, mc: f64, se: Option<f64>, theory: f64| {
        rows.push(vec![
            quantity.to_string(),
            n.to_string(),
            fmt_f64(mc),
            se.map(fmt_f64).unwrap_or_default(),
            fmt_f64(theory),
        ]);
    };
    for d in &distance {
        push("distance_mean", d.n, d.mc.mean, Some(d.mc.standard_error), d.theory_mean);
        push("distance_var", d.n, d.mc.variance(), None, d.theory_var);
        estimates.push((format!("distance_n{}", d.n), d.mc));
    }
    for c in &clustered {
        let se = c.plain.standard_error;
        push("fisher_mean", c.n, c.plain.mean, Some(se), c.plain_theory.expected_value);
        push("fisher_var", c.n, c.plain.variance(), None, c.plain_theory.variance);
        push(
            "clustered_fisher_mean",
            c.n,
            c.clustered.mean,
            Some(c.clustered.standard_error),
            c.clustered_theory.expected_value,
        );
        push("clustered_fisher_var", c.n, c.clustered.variance(), None, c.clustered_theory.variance);
        push(
            "bias_ratio",
            c.n,
            c.plain_bias() / c.clustered_bias(),
            None,
            (traj.variants() - 1) as f64 / (c.ell as f64 - 1.0),
        );
        estimates.push((format!("fisher_n{}", c.n), c.plain));
        estimates.push((format!("clustered_fisher_n{}", c.n), c.clustered));
    }
    for s in &second {
        push("second_order_residual", s.n, s.residual(), Some(s.mc.standard_error), s.predicted);
        estimates.push((format!("control_variate_fisher_n{}", s.n), s.mc));
    }
    for q in &rates {
        let label = format!("{}_rate_{}", q.kind.name(), q.index + 1);
        push(&format!("{label}_mean"), q.n, q.mc.mean, Some(q.mc.standard_error), q.theory_mean);
        push(&format!("{label}_var"), q.n, q.mc.variance(), None, q.theory_var);
        estimates.push((format!("{label}_n{}", q.n), q.mc));
    }
    Ok(vec![
        artifact("theory_vs_mc.csv", table(&["quantity", "n", "mc", "mc_se", "theory"], rows)?),
        with_writer("estimates.csv", |w| write_estimates_csv(w, &estimates))?,
        clustering_artifact(&f)?,
    ])
}

/// Runs the configured experiment in the current rayon pool.
pub fn execute(cfg: &Config, seed: u64) -> Result<Vec<Artifact>> {
    match cfg.experiment {
        ExperimentKind::DistanceMoments => run_distance(cfg, seed),
        ExperimentKind::ModelTrajectory => run_model(cfg),
        ExperimentKind::InfoRateMoments => run_info_rates(cfg, seed),
        ExperimentKind::FisherBiasVsN => run_bias_vs_n(cfg, seed),
        ExperimentKind::FisherBiasVsT => run_bias_vs_t(cfg, seed),
        ExperimentKind::FilteringComparison => run_filtering(cfg, seed),
        ExperimentKind::ElbowScan => run_elbow(cfg),
        ExperimentKind::TheoryVsMc => run_theory_vs_mc(cfg, seed),
    }
}

/// Options for [`run`].
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the config's `seed` when set.
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo; 0 picks one per core.
    pub threads: usize,
}

/// Reads `config_path`, runs the experiment and writes artifacts plus
/// `manifest.json` into `out_dir`.
pub fn run(config_path: &Path, out_dir: &Path, options: &RunOptions) -> Result<Manifest> {
    let text = fs::read(config_path).map_err(|e| {
        Error::Config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let utf8 = std::str::from_utf8(&text)
        .map_err(|_| Error::Config(format!("config {} is not valid UTF-8", config_path.display())))?;
    let cfg = Config::parse(utf8)?;
    let seed = match options.seed {
        Some(s) => s,
        None => cfg.get_or("seed", 0u64)?,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} worker threads: {e}", options.threads)))?;
    let artifacts = pool.install(|| execute(&cfg, seed))?;

    fs::create_dir_all(out_dir).map_err(|e| {
        Error::Config(format!("cannot create output directory {}: {e}", out_dir.display()))
    })?;
    let mut records = Vec::with_capacity(artifacts.len());
    for a in &artifacts {
        let path: PathBuf = out_dir.join(&a.file);
        fs::write(&path, &a.bytes)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        records.push(ArtifactRecord {
            file: a.file.clone(),
            sha256: sha256_hex(&a.bytes),
            bytes: a.bytes.len(),
        });
    }
    let manifest = Manifest {
        experiment: cfg.experiment.name().to_string(),
        config_sha256: sha256_hex(&text),
        seed,
        artifacts: records,
    };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(manifest)
}
