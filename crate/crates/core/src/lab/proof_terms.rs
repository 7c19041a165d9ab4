//! Deterministic quantities bounding the trend contribution:
//! `D(T) = T^{-1/2} ∬ M(t)M(s)a(t-s) dt ds`, `ν(T, s) = ∫_0^T M(t)a(t-s) dt`
//! and `J(T) = ∬ |ν(s)ν(τ)r(s-τ)| ds dτ`, all over `[0, T]`.
//!
//! The double integrals use a product rule: the integrand's nodal factors are
//! interpolated piecewise linearly and the lag function is integrated against
//! the resulting cubic B-spline, so kinks of `a` or `r` on the diagonal do not
//! degrade the rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fft;
use crate::kernel::SmoothingKernel;
use crate::quad::{gk21, integrate_with_breaks, Tolerance};
use crate::spectral::SpectralModel;
use crate::trend::TrendSpec;

/// Minimum number of intervals per axis for `D(T)`.
pub const TREND_TERM_INTERVALS: usize = 2048;
/// Intervals per axis for `J(T)`.
pub const VARIANCE_TERM_INTERVALS: usize = 512;

const QUAD_TOL: Tolerance = Tolerance::new(1e-13, 1e-10);

/// `(hat * hat)(x)`, the centered cubic B-spline on `[-2, 2]`.
fn cubic_bspline(x: f64) -> f64 {
    let x = x.abs();
    if x >= 2.0 {
        return 0.0;
    }
    let outer = (2.0 - x).powi(3) / 6.0;
    let inner = (1.0 - x).max(0.0).powi(3);
    outer - 4.0 * inner / 6.0
}

/// `W(m) = h² ∫ f(mh + xh) B(x) dx` for `m = 0..count`. Lags whose support
/// contains a kink are integrated adaptively; the rest use one Gauss–Kronrod
/// rule per spline piece.
fn lag_weights<F>(f: F, h: f64, count: usize, kinks: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|m| {
            let centre = m as f64 * h;
            let failure = std::sync::Mutex::new(None);
            let integrand = |x: f64| match f(centre + x * h) {
                Ok(v) => v * cubic_bspline(x),
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    0.0
                }
            };
            let mut breaks: Vec<f64> = kinks
                .iter()
                .map(|k| (k - centre) / h)
                .filter(|x| x.abs() < 2.0)
                .collect();
            let value = if breaks.is_empty() {
                [-2.0, -1.0, 0.0, 1.0]
                    .iter()
                    .map(|&a| gk21(&integrand, a, a + 1.0).0)
                    .sum()
            } else {
                breaks.extend_from_slice(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
                breaks.sort_by(f64::total_cmp);
                breaks.dedup();
                integrate_with_breaks(&integrand, &breaks, QUAD_TOL)?.value
            };
            if let Some(e) = failure.into_inner().unwrap() {
                return Err(e);
            }
            Ok(h * h * value)
        })
        .collect()
}

/// `Σ_{i,j} v_i v_j W(|i - j|)` through an FFT autocorrelation of `v`.
fn toeplitz_form(v: &[f64], weights: &[f64]) -> f64 {
    let corr = fft::autocorrelation(v);
    let mut sum = weights[0] * corr[0];
    for m in 1..corr.len() {
        sum += 2.0 * weights[m] * corr[m];
    }
    sum
}

/// Nodal factors with trapezoid end weights, divided by `h`.
fn trapezoid_nodes(values: Vec<f64>) -> Vec<f64> {
    let last = values.len() - 1;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| if i == 0 || i == last { 0.5 * v } else { v })
        .collect()
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon.is_finite() && horizon >= 1.0) {
        return Err(LabError::Validation(format!("horizon T must be >= 1, got {horizon}")));
    }
    Ok(())
}

/// `D(T)` with [`TREND_TERM_INTERVALS`] intervals per axis.
pub fn trend_trend_term(trend: &TrendSpec, kernel: &SmoothingKernel, horizon: f64) -> Result<f64> {
    trend_trend_term_with(trend, kernel, horizon, TREND_TERM_INTERVALS)
}

/// `D(T)` on a grid with `intervals` steps per axis (`intervals ≥ 2048`).
pub fn trend_trend_term_with(trend: &TrendSpec, kernel: &SmoothingKernel, horizon: f64, intervals: usize) -> Result<f64> {
    check_horizon(horizon)?;
    trend.validate()?;
    kernel.validate()?;
    if intervals < TREND_TERM_INTERVALS {
        return Err(LabError::Validation(format!(
            "D(T) needs at least {TREND_TERM_INTERVALS} intervals, got {intervals}"
        )));
    }
    if trend.is_zero() {
        return Ok(0.0);
    }
    let h = horizon / intervals as f64;
    let nodes = trapezoid_nodes((0..=intervals).map(|i| trend.eval(i as f64 * h)).collect());
    let weights = lag_weights(|t| Ok(kernel.fourier(t)), h, intervals + 1, &kernel.fourier_kinks())?;
    Ok(toeplitz_form(&nodes, &weights) / horizon.sqrt())
}

/// `ν(T, s) = ∫_0^T M(t) a(t - s) dt` by adaptive quadrature.
pub fn nu_function(trend: &TrendSpec, kernel: &SmoothingKernel, horizon: f64, s: f64) -> Result<f64> {
    check_horizon(horizon)?;
    if !(0.0..=horizon).contains(&s) {
        return Err(LabError::Validation(format!("s = {s} lies outside [0, {horizon}]")));
    }
    if trend.is_zero() {
        return Ok(0.0);
    }
    let mut breaks = vec![0.0, horizon];
    breaks.extend(
        kernel
            .fourier_kinks()
            .iter()
            .map(|k| s + k)
            .filter(|t| *t > 0.0 && *t < horizon),
    );
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    Ok(integrate_with_breaks(|t| trend.eval(t) * kernel.fourier(t - s), &breaks, QUAD_TOL)?.value)
}

/// `J(T)` together with the normalized `J(T)/T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBound {
    pub horizon: f64,
    pub intervals: usize,
    pub j: f64,
    pub j_over_t: f64,
}

/// `J(T)` with [`VARIANCE_TERM_INTERVALS`] intervals per axis.
pub fn variance_bound_term(
    trend: &TrendSpec,
    kernel: &SmoothingKernel,
    model: &SpectralModel,
    horizon: f64,
) -> Result<VarianceBound> {
    variance_bound_term_with(trend, kernel, model, horizon, VARIANCE_TERM_INTERVALS)
}

pub fn variance_bound_term_with(
    trend: &TrendSpec,
    kernel: &SmoothingKernel,
    model: &SpectralModel,
    horizon: f64,
    intervals: usize,
) -> Result<VarianceBound> {
    check_horizon(horizon)?;
    model.validate()?;
    if intervals < 2 {
        return Err(LabError::Validation("J(T) needs at least 2 intervals".into()));
    }
    let zero = VarianceBound {
        horizon,
        intervals,
        j: 0.0,
        j_over_t: 0.0,
    };
    if trend.is_zero() {
        return Ok(zero);
    }
    let h = horizon / intervals as f64;
    let nu: Vec<f64> = (0..=intervals)
        .into_par_iter()
        .map(|i| nu_function(trend, kernel, horizon, (i as f64 * h).min(horizon)).map(f64::abs))
        .collect::<Result<_>>()?;
    let nodes = trapezoid_nodes(nu);
    // every covariance of the supported families is non-smooth at the origin
    let weights = lag_weights(|t| model.covariance(t).map(f64::abs), h, intervals + 1, &[0.0])?;
    let j = toeplitz_form(&nodes, &weights);
    Ok(VarianceBound {
        j,
        j_over_t: j / horizon,
        ..zero
    })
}
