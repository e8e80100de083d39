use infoclust::clustering::{delta_g_coupling_form, Clustering};
use infoclust::dynamics::{integrate_sir, SirParams};
use infoclust::simplex::{fisher_information, Distribution};

fn model() -> SirParams {
    SirParams::desk_default(6)
}

#[test]
fn replicator_velocity_matches_finite_differences() {
    let traj = integrate_sir(&model(), 4.0, 1e-3).unwrap();
    let k = 2000;
    let err = |stride: usize| {
        let h = stride as f64 * traj.step();
        let (a, b) = (&traj.probabilities()[k - stride], &traj.probabilities()[k + stride]);
        a.probs()
            .iter()
            .zip(b.probs())
            .zip(traj.velocities()[k].components())
            .map(|((x, y), v)| ((y - x) / (2.0 * h) - v).abs())
            .fold(0.0, f64::max)
    };
    let ratio = err(80) / err(40);
    assert!((3.6..=4.4).contains(&ratio), "central-difference error ratio {ratio}");
}

#[test]
fn relabelling_variants_permutes_the_trajectory() {
    let params = model();
    let perm = [3, 0, 5, 1, 4, 2];
    let a = integrate_sir(&params, 3.0, 1e-3).unwrap();
    let b = integrate_sir(&params.permuted(&perm), 3.0, 1e-3).unwrap();
    for k in (0..a.len()).step_by(250) {
        let (pa, pb) = (a.probabilities()[k].probs(), b.probabilities()[k].probs());
        for (new, &old) in perm.iter().enumerate() {
            assert!((pb[new] - pa[old]).abs() < 1e-14);
        }
        assert!((a.fisher_at_index(k) - b.fisher_at_index(k)).abs() <= 1e-12 * a.fisher_at_index(k));
    }
}

#[test]
fn fisher_information_is_coupling_variance() {
    let traj = integrate_sir(&model(), 6.0, 1e-3).unwrap();
    let single = Clustering::new(vec![0; 6]).unwrap();
    for k in (0..traj.len()).step_by(500) {
        let p: &Distribution = &traj.probabilities()[k];
        let d = &traj.couplings()[k];
        let mean: f64 = p.probs().iter().zip(d).map(|(p, d)| p * d).sum();
        let var: f64 = p.probs().iter().zip(d).map(|(p, d)| p * (d - mean) * (d - mean)).sum();
        let g = fisher_information(p, &traj.velocities()[k]).unwrap();
        assert!((g - var).abs() <= 1e-12 * var.max(1e-300), "t={}: {g} vs {var}", traj.times()[k]);
        // With one cluster nothing survives and the loss is the whole variance.
        let loss = delta_g_coupling_form(p, d, &single).unwrap();
        assert!((loss - var).abs() <= 1e-12 * var.max(1e-300));
    }
}

#[test]
fn population_is_conserved_and_shares_stay_interior() {
    let traj = integrate_sir(&SirParams::desk_default(10), 10.0, 1e-3).unwrap();
    for s in traj.states() {
        assert!((s.total() - 1.0).abs() < 1e-12);
    }
    assert!(traj.probabilities().iter().all(|p| p.is_interior()));
}
