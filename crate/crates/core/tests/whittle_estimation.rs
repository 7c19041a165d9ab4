use std::f64::consts::PI;

use trendlab::periodogram::compute_periodogram;
use trendlab::simulate::{replication_seed, CirculantSampler, SamplingGrid};
use trendlab::whittle::{estimate, estimating_equation_residual, whittle_objective, EstimatingWeight, WeightForm, WhittleConfig};
use trendlab::{Periodogram, SpectralModel};

fn ou() -> SpectralModel {
    SpectralModel::ou(1.0, 1.0).unwrap()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn noise_free_objective_is_stationary_at_truth() {
    let grid = SamplingGrid::new(409.6, 4096).unwrap();
    let m = ou();
    let pg = Periodogram::from_fn(grid, 0.0, |l| m.density(l)).unwrap();
    let h = 1e-5;
    for i in 0..2 {
        let mut up = vec![1.0, 1.0];
        let mut down = up.clone();
        up[i] += h;
        down[i] -= h;
        let d = (whittle_objective(&pg, &m, &up, WeightForm::Rational).unwrap()
            - whittle_objective(&pg, &m, &down, WeightForm::Rational).unwrap())
            / (2.0 * h);
        assert!(d.abs() < 1e-6, "component {i}: {d}");
    }
}

#[test]
fn objective_uses_the_grid_symmetrically() {
    let grid = SamplingGrid::new(100.0, 1024).unwrap();
    let m = ou();
    let path = CirculantSampler::new(&m, grid).unwrap().sample(5);
    let pg = compute_periodogram(&path);
    let full = whittle_objective(&pg, &m, &[1.3, 0.9], WeightForm::Rational).unwrap();
    let origin = pg.origin_index();
    let w = pg.trapezoid_weights();
    let candidate = SpectralModel::ou(1.3, 0.9).unwrap();
    let half: f64 = (origin + 1..pg.ordinates.len())
        .map(|j| {
            let l = pg.frequencies[j];
            let f = candidate.density(l).unwrap();
            2.0 * w[j] * WeightForm::Rational.eval(l) * (f.ln() + pg.ordinates[j] / f)
        })
        .sum::<f64>()
        / (4.0 * PI);
    assert!((full - half).abs() < 1e-10 * full.abs().max(1.0));
}

#[test]
fn truth_beats_distant_parameters_on_simulated_paths() {
    let grid = SamplingGrid::new(409.6, 4096).unwrap();
    let m = ou();
    let sampler = CirculantSampler::new(&m, grid).unwrap();
    for i in 0..100 {
        let pg = compute_periodogram(&sampler.sample(replication_seed(30, i)));
        let at_truth = whittle_objective(&pg, &m, &[1.0, 1.0], WeightForm::Rational).unwrap();
        let far = whittle_objective(&pg, &m, &[4.0, 1.0], WeightForm::Rational).unwrap();
        assert!(far > at_truth, "replication {i}");
    }
}

#[test]
fn residual_is_small_at_every_converged_estimate() {
    let grid = SamplingGrid::new(204.8, 2048).unwrap();
    let m = ou();
    let cfg = WhittleConfig::default_for(&m);
    let sampler = CirculantSampler::new(&m, grid).unwrap();
    let g = EstimatingWeight::Whittle { weight: cfg.weight };
    let init = [2.0, 1.0];
    for i in 0..20 {
        let pg = compute_periodogram(&sampler.sample(replication_seed(31, i)));
        let est = estimate(&pg, &m, &cfg, &init).unwrap();
        assert!(est.converged);
        let at_init = norm(&estimating_equation_residual(&pg, &m, &init, &g, &[0, 1]).unwrap());
        let at_hat = norm(&estimating_equation_residual(&pg, &m, &est.theta_hat, &g, &[0, 1]).unwrap());
        assert!(at_hat < 1e-3 * (1.0 + at_init), "replication {i}: {at_hat} vs {at_init}");
    }
}

#[test]
fn rate_is_equivariant_under_path_scaling() {
    let grid = SamplingGrid::new(204.8, 2048).unwrap();
    let m = ou();
    let cfg = WhittleConfig::default_for(&m);
    let path = CirculantSampler::new(&m, grid).unwrap().sample(77);
    let a = estimate(&compute_periodogram(&path), &m, &cfg, &[2.0, 1.0]).unwrap();
    let b = estimate(&compute_periodogram(&path.scaled(3.0)), &m, &cfg, &[2.0, 1.0]).unwrap();
    assert!((a.theta_hat[0] - b.theta_hat[0]).abs() < 1e-4, "{:?} vs {:?}", a.theta_hat, b.theta_hat);
    assert!((b.theta_hat[1] / a.theta_hat[1] - 9.0).abs() < 1e-3);
}

#[test]
fn median_rate_error_is_small_at_t400() {
    let grid = SamplingGrid::new(409.6, 4096).unwrap();
    let m = ou();
    let cfg = WhittleConfig::default_for(&m);
    let sampler = CirculantSampler::new(&m, grid).unwrap();
    let mut errs: Vec<f64> = (0..100)
        .map(|i| {
            let pg = compute_periodogram(&sampler.sample(replication_seed(32, i)));
            (estimate(&pg, &m, &cfg, &[2.0, 1.0]).unwrap().theta_hat[0] - 1.0).abs()
        })
        .collect();
    errs.sort_by(f64::total_cmp);
    let median = 0.5 * (errs[49] + errs[50]);
    assert!(median < 0.15, "{median}");
}

#[test]
fn frbm_noise_free_recovery_of_u() {
    let grid = SamplingGrid::new(409.6, 4096).unwrap();
    let m = SpectralModel::frbm(0.2, 1.0, 1.0).unwrap();
    let pg = Periodogram::from_fn(grid, 0.0, |l| m.density(l)).unwrap();
    let cfg = WhittleConfig::default_for(&m);
    let est = estimate(&pg, &m, &cfg, &[0.35, 1.0, 2.0]).unwrap();
    assert!((est.theta_hat[0] - 0.2).abs() < 1e-3, "{:?}", est.theta_hat);
    assert!((est.theta_hat[2] - 1.0).abs() < 1e-2, "{:?}", est.theta_hat);
}
