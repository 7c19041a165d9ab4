use std::f64::consts::PI;

use proptest::prelude::*;
use trendlab::spectral::{frbm_covariance_asymptote, MemoryClass, SpectralModel};
use trendlab::whittle::asymptotic_variance;
use trendlab::SmoothingKernel;

fn frbm() -> SpectralModel {
    SpectralModel::frbm(0.25, 1.0, 1.0).unwrap()
}

/// Composite trapezoid of `f` on `[a, b]` with `nodes` points.
fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> f64 {
    let h = (b - a) / (nodes - 1) as f64;
    let inner: f64 = (1..nodes - 1).map(|k| f(a + k as f64 * h)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

#[test]
fn frbm_covariance_matches_brute_force_trapezoid() {
    // λ = μ² turns c λ^{-1/2} (1+λ²)^{-1} dλ into the smooth 2c dμ / (1+μ⁴)
    let t = 10.0;
    let half = 200f64.sqrt();
    let oracle = trapezoid(|mu| 2.0 / (1.0 + mu.powi(4)) * (mu * mu * t).cos(), -half, half, 1_000_000);
    let r = frbm().covariance(t).unwrap();
    assert!(((r - oracle) / oracle).abs() < 1e-4, "{r} vs {oracle}");
}

#[test]
fn frbm_covariance_at_large_lag_matches_brute_force() {
    let t = 500.0;
    let half = 200f64.sqrt();
    let oracle = trapezoid(|mu| 2.0 / (1.0 + mu.powi(4)) * (mu * mu * t).cos(), -half, half, 20_000_001);
    let r = frbm().covariance(t).unwrap();
    assert!(((r - oracle) / oracle).abs() < 1e-4, "{r} vs {oracle}");
}

#[test]
fn frbm_asymptote_constant_is_twice_c() {
    // r(t) ~ 2c Γ(1-2u) sin(πu) t^{2u-1} with r = ∫_ℝ e^{iλt} f dλ
    let m = frbm();
    let ratio = m.covariance(500.0).unwrap() / frbm_covariance_asymptote(&m, 500.0, None).unwrap();
    assert!((ratio - 2.0).abs() < 1e-3, "{ratio}");
    let a = frbm_covariance_asymptote(&m, 40.0, None).unwrap();
    let b = frbm_covariance_asymptote(&m, 80.0, None).unwrap();
    assert!((b / a - 2f64.powf(-0.5)).abs() < 1e-14);
}

#[test]
fn frbm_density_tail_order() {
    let m = frbm();
    for l in [1e3, 1e4] {
        let scaled = m.density(l).unwrap() * l.powf(2.0 * (0.25 + 1.0));
        assert!((scaled - 1.0).abs() < 0.02, "λ={l}: {scaled}");
    }
}

#[test]
fn ou_covariance_quadrature_tight() {
    let m = SpectralModel::ou(1.0, 1.0).unwrap();
    for k in 0..=40 {
        let t = 0.5 * k as f64;
        assert!((m.covariance_by_quadrature(t).unwrap() - (-t).exp()).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn cauchy_schwarz_on_computed_lags() {
    for m in [frbm(), SpectralModel::ou(0.7, 2.0).unwrap()] {
        let r0 = m.covariance(0.0).unwrap();
        for k in 1..=30 {
            assert!(m.covariance(0.7 * k as f64).unwrap().abs() <= r0);
        }
    }
}

#[test]
fn scaled_model_classification() {
    let m = SpectralModel::scaled(SpectralModel::ou(1.0, 1.0).unwrap(), 2.0).unwrap();
    assert_eq!(m.classify_memory(), MemoryClass::Short);
    assert!((m.covariance(0.0).unwrap() - 2.0).abs() < 1e-15);
}

#[test]
fn variance_matches_brute_force_trapezoid() {
    let model = SpectralModel::ou(1.0, 1.0).unwrap();
    let kernel = SmoothingKernel::poisson();
    let integral = trapezoid(
        |l| (model.density(l).unwrap() * kernel.density(l).unwrap()).powi(2),
        -1e3,
        1e3,
        10_000_001,
    );
    let oracle = 16.0 * PI.powi(3) * integral;
    let sigma2 = asymptotic_variance(&model, &kernel).unwrap();
    assert!(((sigma2 - oracle) / oracle).abs() < 1e-4, "{sigma2} vs {oracle}");
    assert!((sigma2 - 5.0).abs() < 1e-8);
    let doubled = asymptotic_variance(&model, &kernel.scaled(2.0)).unwrap();
    assert!((doubled - 4.0 * sigma2).abs() < 1e-12 * sigma2);
    assert_eq!(asymptotic_variance(&model, &kernel.scaled(0.0)).unwrap(), 0.0);
}

proptest! {
    #[test]
    fn densities_are_even_and_nonnegative(l in -1e4f64..1e4, u in 0.01f64..0.49, v in 0.6f64..3.0, rate in 0.05f64..10.0) {
        prop_assume!(l != 0.0);
        for m in [SpectralModel::frbm(u, v, 1.3).unwrap(), SpectralModel::ou(rate, 0.8).unwrap()] {
            let a = m.density(l).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert_eq!(a, m.density(-l).unwrap());
        }
    }

    #[test]
    fn covariance_is_even(t in 0.0f64..30.0) {
        let m = SpectralModel::ou(1.5, 2.0).unwrap();
        prop_assert_eq!(m.covariance(t).unwrap(), m.covariance(-t).unwrap());
    }

    #[test]
    fn kernel_densities_even_and_nonnegative(l in -100f64..100.0, b in 0.1f64..5.0) {
        for k in [SmoothingKernel::poisson(), SmoothingKernel::fejer(b).unwrap()] {
            let g = k.density(l).unwrap();
            prop_assert!(g >= 0.0);
            prop_assert_eq!(g, k.density(-l).unwrap());
        }
    }
}
