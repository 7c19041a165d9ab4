use proptest::prelude::*;
use trendlab::periodogram::{compute_periodogram, quadratic_form_with, kernel_lag_table, smoothed_functional};
use trendlab::simulate::{replication_seed, CirculantSampler, PathLabel, SampledPath, SamplingGrid};
use trendlab::spectral::SpectralModel;
use trendlab::stats::SampleStats;
use trendlab::whittle::spectral_functional;
use trendlab::{quadratic_form_functional, SmoothingKernel};

fn ou() -> SpectralModel {
    SpectralModel::ou(1.0, 1.0).unwrap()
}

#[test]
fn duality_at_4096_points() {
    let grid = SamplingGrid::new(409.6, 4096).unwrap();
    let sampler = CirculantSampler::new(&ou(), grid).unwrap();
    let k = SmoothingKernel::poisson();
    let lags = kernel_lag_table(&k, &grid);
    for i in 0..20 {
        let p = sampler.sample(replication_seed(1, i));
        let freq = smoothed_functional(&compute_periodogram(&p), &k).unwrap();
        let time = quadratic_form_with(&p, &lags);
        assert!((freq - time).abs() / time.abs().max(1e-9) < 1e-2, "path {i}: {freq} vs {time}");
    }
}

#[test]
fn smoothed_functional_mean_matches_limit() {
    let grid = SamplingGrid::new(204.8, 2048).unwrap();
    let sampler = CirculantSampler::new(&ou(), grid).unwrap();
    let k = SmoothingKernel::poisson();
    let values: Vec<f64> = (0..500)
        .map(|i| smoothed_functional(&compute_periodogram(&sampler.sample(replication_seed(2, i))), &k).unwrap())
        .collect();
    let s = SampleStats::from_samples(&values).unwrap();
    let target = spectral_functional(&ou(), &k).unwrap();
    assert!((s.mean - target).abs() < 3.0 * s.std_error, "{} vs {target} (se {})", s.mean, s.std_error);
}

fn arbitrary_path() -> impl Strategy<Value = SampledPath> {
    prop::collection::vec(-5.0f64..5.0, 128).prop_map(|v| {
        let grid = SamplingGrid::new(25.0, 128).unwrap();
        SampledPath::new(grid, v, PathLabel::Clean, 0).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn periodogram_is_even_and_nonnegative(p in arbitrary_path()) {
        let pg = compute_periodogram(&p);
        let last = pg.ordinates.len() - 1;
        for j in 0..=last {
            prop_assert!(pg.ordinates[j] >= 0.0);
            let scale = pg.ordinates[j].max(1e-12);
            prop_assert!((pg.ordinates[j] - pg.ordinates[last - j]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn functionals_are_quadratic_in_the_path(p in arbitrary_path(), c in -4.0f64..4.0) {
        let k = SmoothingKernel::poisson();
        let base = smoothed_functional(&compute_periodogram(&p), &k).unwrap();
        let scaled = smoothed_functional(&compute_periodogram(&p.scaled(c)), &k).unwrap();
        prop_assert!((scaled - c * c * base).abs() <= 1e-10 * (1.0 + base.abs() * c * c));
        let qb = quadratic_form_functional(&p, &k);
        let qs = quadratic_form_functional(&p.scaled(c), &k);
        prop_assert!((qs - c * c * qb).abs() <= 1e-10 * (1.0 + qb.abs() * c * c));
    }

    #[test]
    fn functionals_are_linear_in_the_kernel(p in arbitrary_path(), w in 0.0f64..10.0, b in 0.2f64..3.0) {
        let k = SmoothingKernel::fejer(b).unwrap();
        let pg = compute_periodogram(&p);
        let one = smoothed_functional(&pg, &k).unwrap();
        let many = smoothed_functional(&pg, &k.scaled(w)).unwrap();
        prop_assert!((many - w * one).abs() <= 1e-12 * (1.0 + w * one.abs()));
    }

    #[test]
    fn parseval_holds_for_every_path(p in arbitrary_path()) {
        let pg = compute_periodogram(&p);
        let energy = p.grid.step() * p.values.iter().map(|v| v * v).sum::<f64>() / p.grid.horizon();
        prop_assert!((pg.integral() - energy).abs() <= 1e-10 * energy.max(1e-12));
    }
}
