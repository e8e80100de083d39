//! Multi-variant SIR model and the statistical model it induces.
//!
//! `N+1` pathogen variants compete for one susceptible pool:
//!
//! ```text
//! dS/dt  = −Σ_ν γ^ν I^ν S
//! dI^μ/dt =  γ^μ I^μ S − ε^μ I^μ
//! dR/dt  =  Σ_ν ε^ν I^ν
//! ```
//!
//! The variant shares `p^μ = I^μ / Σ_ν I^ν` obey the replicator equation
//! `ṗ^μ = p^μ (d^μ − ⟨d⟩_p)` with effective couplings `d^μ = γ^μ S − ε^μ`.

use std::io::Write;

use crate::csvfmt::fmt_f64;
use crate::error::{Error, Result};
use crate::simplex::{fisher_information, Distribution, TangentVector};

/// Largest accepted drift of `S + ΣI + R` away from 1.
pub const CONSERVATION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SirParams {
    /// Infection rates γ^μ.
    pub gamma: Vec<f64>,
    /// Recovery rates ε^μ.
    pub epsilon: Vec<f64>,
    pub s0: f64,
    pub i0: Vec<f64>,
    pub r0: f64,
}

/// Initial susceptible fraction used for the desk-scale model.
pub const DESK_S0: f64 = 0.9445;

fn evenly_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

impl SirParams {
    /// Deterministic default: γ evenly spaced in [1.5, 2.5], ε evenly spaced in
    /// [0.9, 1.1], S(0) = 0.9445, R(0) = 0 and the infected mass split evenly.
    pub fn desk_default(variants: usize) -> Self {
        assert!(variants > 0, "need at least one variant");
        let infected = 1.0 - DESK_S0;
        SirParams {
            gamma: evenly_spaced(1.5, 2.5, variants),
            epsilon: evenly_spaced(0.9, 1.1, variants),
            s0: DESK_S0,
            i0: vec![infected / variants as f64; variants],
            r0: 0.0,
        }
    }

    /// Variants share one rate pair per group; `groups[g] = (γ, ε, size)`.
    /// Initial infected mass is split evenly over all variants.
    pub fn grouped(groups: &[(f64, f64, usize)], s0: f64) -> Self {
        let mut gamma = Vec::new();
        let mut epsilon = Vec::new();
        for &(g, e, size) in groups {
            gamma.extend(std::iter::repeat_n(g, size));
            epsilon.extend(std::iter::repeat_n(e, size));
        }
        let variants = gamma.len();
        SirParams {
            gamma,
            epsilon,
            s0,
            i0: vec![(1.0 - s0) / variants as f64; variants],
            r0: 0.0,
        }
    }

    pub fn variants(&self) -> usize {
        self.gamma.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.gamma.len();
        if m == 0 {
            return Err(Error::argument("at least one variant is required"));
        }
        Error::ensure_len(m, self.epsilon.len())?;
        Error::ensure_len(m, self.i0.len())?;
        for (index, (&g, &e)) in self.gamma.iter().zip(&self.epsilon).enumerate() {
            if !(g >= 0.0 && e >= 0.0 && g.is_finite() && e.is_finite()) {
                return Err(Error::Domain {
                    index,
                    reason: format!("rates must be finite and nonnegative (gamma={g}, epsilon={e})"),
                });
            }
        }
        if let Some(index) = self.i0.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::Domain {
                index,
                reason: "initial infected fraction must be positive".into(),
            });
        }
        if !(self.s0 >= 0.0 && self.r0 >= 0.0) {
            return Err(Error::argument("initial S and R must be nonnegative"));
        }
        let total = self.s0 + self.i0.iter().sum::<f64>() + self.r0;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::argument(format!(
                "initial compartments sum to {total}, not 1"
            )));
        }
        Ok(())
    }

    /// Relabels variants: new variant `k` is old variant `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        SirParams {
            gamma: perm.iter().map(|&k| self.gamma[k]).collect(),
            epsilon: perm.iter().map(|&k| self.epsilon[k]).collect(),
            s0: self.s0,
            i0: perm.iter().map(|&k| self.i0[k]).collect(),
            r0: self.r0,
        }
    }
}

/// Compartment fractions at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SirState {
    pub susceptible: f64,
    pub infected: Vec<f64>,
    pub recovered: f64,
}

impl SirState {
    pub fn total(&self) -> f64 {
        self.susceptible + self.infected.iter().sum::<f64>() + self.recovered
    }

    fn axpy(&self, h: f64, k: &SirState) -> SirState {
        SirState {
            susceptible: self.susceptible + h * k.susceptible,
            infected: self
                .infected
                .iter()
                .zip(&k.infected)
                .map(|(x, dx)| x + h * dx)
                .collect(),
            recovered: self.recovered + h * k.recovered,
        }
    }
}

fn derivative(params: &SirParams, y: &SirState) -> SirState {
    let s = y.susceptible;
    let mut infection = 0.0;
    let mut recovery = 0.0;
    let infected = y
        .infected
        .iter()
        .zip(params.gamma.iter().zip(&params.epsilon))
        .map(|(&i, (&g, &e))| {
            infection += g * i * s;
            recovery += e * i;
            g * i * s - e * i
        })
        .collect();
    SirState {
        susceptible: -infection,
        infected,
        recovered: recovery,
    }
}

fn rk4_step(params: &SirParams, y: &SirState, h: f64) -> SirState {
    let k1 = derivative(params, y);
    let k2 = derivative(params, &y.axpy(0.5 * h, &k1));
    let k3 = derivative(params, &y.axpy(0.5 * h, &k2));
    let k4 = derivative(params, &y.axpy(h, &k3));
    SirState {
        susceptible: y.susceptible
            + h / 6.0 * (k1.susceptible + 2.0 * k2.susceptible + 2.0 * k3.susceptible + k4.susceptible),
        infected: (0..y.infected.len())
            .map(|m| {
                y.infected[m]
                    + h / 6.0
                        * (k1.infected[m] + 2.0 * k2.infected[m] + 2.0 * k3.infected[m] + k4.infected[m])
            })
            .collect(),
        recovered: y.recovered
            + h / 6.0 * (k1.recovered + 2.0 * k2.recovered + 2.0 * k3.recovered + k4.recovered),
    }
}

fn step_count(t_end: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::argument(format!("step must be positive, got {step}")));
    }
    if !(t_end >= step) {
        return Err(Error::argument(format!(
            "t_end {t_end} must be at least one step ({step})"
        )));
    }
    let steps = (t_end / step).round() as usize;
    if ((steps as f64) * step - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(Error::argument(format!(
            "t_end {t_end} is not an integer multiple of step {step}"
        )));
    }
    Ok(steps)
}

/// Classical RK4 states on the grid `k·step`, `k = 0..=t_end/step`.
pub fn integrate_states(params: &SirParams, t_end: f64, step: f64) -> Result<Vec<SirState>> {
    params.validate()?;
    let steps = step_count(t_end, step)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = SirState {
        susceptible: params.s0,
        infected: params.i0.clone(),
        recovered: params.r0,
    };
    states.push(y.clone());
    for k in 1..=steps {
        y = rk4_step(params, &y, step);
        let time = k as f64 * step;
        if let Some(index) = y.infected.iter().position(|&i| !(i > 0.0)) {
            return Err(Error::Integration {
                time,
                reason: format!("infected fraction of variant {index} reached {}", y.infected[index]),
            });
        }
        let drift = (y.total() - 1.0).abs();
        if !(drift <= CONSERVATION_LIMIT) {
            return Err(Error::Integration {
                time,
                reason: format!("population drifted by {drift:e}; use a smaller step"),
            });
        }
        states.push(y.clone());
    }
    Ok(states)
}

/// Effective couplings `d^μ = γ^μ S − ε^μ`.
pub fn couplings_at(params: &SirParams, susceptible: f64) -> Vec<f64> {
    debug_assert!((0.0..=1.0).contains(&susceptible));
    params
        .gamma
        .iter()
        .zip(&params.epsilon)
        .map(|(g, e)| g * susceptible - e)
        .collect()
}

/// `⟨d⟩_p = Σ p^μ d^μ`.
pub fn mean_coupling(p: &Distribution, d: &[f64]) -> Result<f64> {
    Error::ensure_len(p.len(), d.len())?;
    Ok(p.probs().iter().zip(d).map(|(x, y)| x * y).sum())
}

/// Replicator velocity `ṗ^μ = p^μ (d^μ − ⟨d⟩_p)`.
pub fn replicator_velocity(p: &Distribution, d: &[f64]) -> Result<TangentVector> {
    let mean = mean_coupling(p, d)?;
    let mut v: Vec<f64> = p.probs().iter().zip(d).map(|(x, y)| x * (y - mean)).collect();
    // Remove the rounding residue so Σṗ = 0 holds to machine precision.
    let residue: f64 = v.iter().sum();
    if let Some((k, _)) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    {
        v[k] -= residue;
    }
    TangentVector::new(v)
}

/// The continuous statistical model on a fine uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    step: f64,
    times: Vec<f64>,
    states: Vec<SirState>,
    p: Vec<Distribution>,
    pdot: Vec<TangentVector>,
    couplings: Vec<Vec<f64>>,
    mean_coupling: Vec<f64>,
}

/// Values of a [`Trajectory`] at one grid point.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint<'a> {
    pub time: f64,
    pub p: &'a Distribution,
    pub pdot: &'a TangentVector,
    pub susceptible: f64,
    pub couplings: &'a [f64],
}

/// Integrates the model with RK4 and derives `p`, `ṗ` and the couplings at every
/// grid time.
pub fn integrate_sir(params: &SirParams, t_end: f64, step: f64) -> Result<Trajectory> {
    let states = integrate_states(params, t_end, step)?;
    let mut times = Vec::with_capacity(states.len());
    let mut p = Vec::with_capacity(states.len());
    let mut pdot = Vec::with_capacity(states.len());
    let mut couplings = Vec::with_capacity(states.len());
    let mut means = Vec::with_capacity(states.len());
    for (k, state) in states.iter().enumerate() {
        let dist = Distribution::from_weights(&state.infected)?;
        let d = couplings_at(params, state.susceptible.clamp(0.0, 1.0));
        let v = replicator_velocity(&dist, &d)?;
        means.push(mean_coupling(&dist, &d)?);
        times.push(k as f64 * step);
        p.push(dist);
        pdot.push(v);
        couplings.push(d);
    }
    Ok(Trajectory {
        step,
        times,
        states,
        p,
        pdot,
        couplings,
        mean_coupling: means,
    })
}

impl Trajectory {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least two points")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn variants(&self) -> usize {
        self.p[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SirState] {
        &self.states
    }

    pub fn probabilities(&self) -> &[Distribution] {
        &self.p
    }

    pub fn velocities(&self) -> &[TangentVector] {
        &self.pdot
    }

    pub fn couplings(&self) -> &[Vec<f64>] {
        &self.couplings
    }

    pub fn mean_couplings(&self) -> &[f64] {
        &self.mean_coupling
    }

    /// Grid index nearest to `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let t_end = self.t_end();
        let slack = 1e-9 * self.step;
        if !(t >= -slack && t <= t_end + slack) {
            return Err(Error::Range {
                what: "time",
                value: t,
                lo: 0.0,
                hi: t_end,
            });
        }
        Ok(((t / self.step).round() as usize).min(self.times.len() - 1))
    }

    pub fn point(&self, k: usize) -> TrajectoryPoint<'_> {
        TrajectoryPoint {
            time: self.times[k],
            p: &self.p[k],
            pdot: &self.pdot[k],
            susceptible: self.states[k].susceptible,
            couplings: &self.couplings[k],
        }
    }

    /// Fisher information `g_tt` at grid index `k`.
    pub fn fisher_at_index(&self, k: usize) -> f64 {
        fisher_information(&self.p[k], &self.pdot[k]).expect("trajectory points are interior")
    }

    /// Self-information rates `İ^μ = d^μ − ⟨d⟩_p` at grid index `k`.
    pub fn info_rate_at_index(&self, k: usize) -> Vec<f64> {
        let mean = self.mean_coupling[k];
        self.couplings[k].iter().map(|d| d - mean).collect()
    }

    /// Writes `t, S, p_*, pdot_*, d_*, mean_d` with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let m = self.variants();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string(), "S".to_string()];
        for prefix in ["p", "pdot", "d"] {
            header.extend((1..=m).map(|k| format!("{prefix}_{k}")));
        }
        header.push("mean_d".into());
        w.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = Vec::with_capacity(3 * m + 3);
            row.push(fmt_f64(self.times[k]));
            row.push(fmt_f64(self.states[k].susceptible));
            row.extend(self.p[k].probs().iter().map(|&x| fmt_f64(x)));
            row.extend(self.pdot[k].components().iter().map(|&x| fmt_f64(x)));
            row.extend(self.couplings[k].iter().map(|&x| fmt_f64(x)));
            row.push(fmt_f64(self.mean_coupling[k]));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Values at the nearest fine-grid point to `t`.
pub fn trajectory_at(traj: &Trajectory, t: f64) -> Result<TrajectoryPoint<'_>> {
    Ok(traj.point(traj.index_of(t)?))
}
