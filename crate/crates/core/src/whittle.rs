//! Weighted Whittle objective, estimating equations, the minimum-contrast
//! estimator and the limiting variance of smoothed periodogram functionals.
//!
//! All frequency sums run over the FFT grid of the periodogram with the
//! trapezoid weights and skip the `λ = 0` bin, where long-memory densities
//! have their pole.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::kernel::{KernelShape, SmoothingKernel};
use crate::optimize::{minimize, Bounds, NelderMeadOptions};
use crate::periodogram::Periodogram;
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::spectral::SpectralModel;

/// Weight `w(λ)` in the Whittle functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum WeightForm {
    /// `w(λ) = 1 / (1 + λ²)`.
    Rational,
    /// `w(λ) = 1` on `|λ| ≤ band`, zero outside.
    ConstantOnBand { band: f64 },
}

impl WeightForm {
    pub fn eval(&self, lambda: f64) -> f64 {
        match *self {
            WeightForm::Rational => 1.0 / (1.0 + lambda * lambda),
            WeightForm::ConstantOnBand { band } => {
                if lambda.abs() <= band {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightForm::Rational => Ok(()),
            WeightForm::ConstantOnBand { band } if band.is_finite() && band > 0.0 => Ok(()),
            WeightForm::ConstantOnBand { band } => {
                Err(LabError::Validation(format!("weight band must be > 0, got {band}")))
            }
        }
    }
}

/// Settings for [`estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhittleConfig {
    pub weight: WeightForm,
    /// Indices into `θ` that are estimated; the rest stay at their initial value.
    pub free: Vec<usize>,
    /// Box for the free parameters, in the order of `free`.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Replace the multiplicative scale of `f` by its closed-form optimum
    /// instead of searching over it.
    pub profile_scale: bool,
    pub simplex_tol: f64,
    pub max_evaluations: usize,
}

impl WhittleConfig {
    /// Default settings for a model: OU estimates the rate, fRBm estimates
    /// `u` (with `v` fixed); the scale parameter is profiled out in both.
    pub fn default_for(model: &SpectralModel) -> Self {
        let (free, lower, upper) = match model {
            SpectralModel::Scaled { base, .. } => return Self::default_for(base),
            SpectralModel::Frbm { .. } => (vec![0, 2], vec![0.01, 1e-6], vec![0.49, 1e6]),
            SpectralModel::Ou { .. } => (vec![0, 1], vec![0.01, 1e-6], vec![20.0, 1e6]),
        };
        Self {
            weight: WeightForm::Rational,
            free,
            lower,
            upper,
            profile_scale: true,
            simplex_tol: 1e-5,
            max_evaluations: 2000,
        }
    }

    pub fn validate(&self, model: &SpectralModel) -> Result<()> {
        self.weight.validate()?;
        let p = model.theta().len();
        if self.free.is_empty() {
            return Err(LabError::Validation("no free parameters to estimate".into()));
        }
        if self.free.len() != self.lower.len() || self.free.len() != self.upper.len() {
            return Err(LabError::Validation("bounds must list one interval per free parameter".into()));
        }
        if let Some(&bad) = self.free.iter().find(|&&i| i >= p) {
            return Err(LabError::Validation(format!("free index {bad} out of range for {p} parameters")));
        }
        Bounds::new(self.lower.clone(), self.upper.clone())?;
        if !(self.simplex_tol > 0.0) || self.max_evaluations == 0 {
            return Err(LabError::Validation("optimizer tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Free indices searched by the simplex, with their bounds.
    fn searched(&self, model: &SpectralModel) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
        let scale = model.scale_index();
        let mut idx = Vec::new();
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for (k, &i) in self.free.iter().enumerate() {
            if self.profile_scale && i == scale {
                continue;
            }
            idx.push(i);
            lo.push(self.lower[k]);
            hi.push(self.upper[k]);
        }
        (idx, lo, hi)
    }

    fn profiles(&self, model: &SpectralModel) -> bool {
        self.profile_scale && self.free.contains(&model.scale_index())
    }
}

/// Result of [`estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub theta_hat: Vec<f64>,
    pub objective: f64,
    pub converged: bool,
    pub evaluations: usize,
    /// The estimate lies on a face of the parameter box.
    pub at_boundary: bool,
}

fn density_grid(pg: &Periodogram, model: &SpectralModel) -> Result<Vec<f64>> {
    let origin = pg.origin_index();
    pg.frequencies
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            if j == origin {
                return Ok(f64::NAN);
            }
            let f = model.density(l)?;
            if !(f > 0.0 && f.is_finite()) {
                return Err(LabError::Domain(format!(
                    "spectral density {f} at λ = {l} is not positive for θ = {:?}",
                    model.theta()
                )));
            }
            Ok(f)
        })
        .collect()
}

/// Weighted Whittle functional `(1/4π) ∫ [log f(λ,θ) + I_T(λ)/f(λ,θ)] w(λ) dλ`.
pub fn whittle_objective(pg: &Periodogram, model: &SpectralModel, theta: &[f64], weight: WeightForm) -> Result<f64> {
    let candidate = model.with_theta(theta)?;
    let f = density_grid(pg, &candidate)?;
    let origin = pg.origin_index();
    let mut sum = 0.0;
    for (j, wt) in pg.trapezoid_weights().iter().enumerate() {
        if j == origin {
            continue;
        }
        let w = weight.eval(pg.frequencies[j]);
        sum += wt * w * (f[j].ln() + pg.ordinates[j] / f[j]);
    }
    Ok(sum / (4.0 * PI))
}

/// Scale that minimizes the objective when the other parameters are fixed.
fn profiled_scale(pg: &Periodogram, model: &SpectralModel, theta: &[f64], weight: WeightForm) -> Result<f64> {
    let scale_index = model.scale_index();
    let mut unit = theta.to_vec();
    unit[scale_index] = 1.0;
    let shape = model.with_theta(&unit)?;
    let h = density_grid(pg, &shape)?;
    let origin = pg.origin_index();
    let (mut num, mut den) = (0.0, 0.0);
    for (j, wt) in pg.trapezoid_weights().iter().enumerate() {
        if j == origin {
            continue;
        }
        let w = wt * weight.eval(pg.frequencies[j]);
        num += w * pg.ordinates[j] / h[j];
        den += w;
    }
    if !(den > 0.0) {
        return Err(LabError::Domain("weight vanishes on the frequency grid".into()));
    }
    let scale = num / den;
    if !(scale > 0.0) {
        return Err(LabError::Domain("profiled scale is not positive (zero periodogram?)".into()));
    }
    Ok(scale)
}

/// Minimum-contrast estimate of `θ` by Nelder–Mead within the configured box.
pub fn estimate(pg: &Periodogram, model: &SpectralModel, cfg: &WhittleConfig, theta_init: &[f64]) -> Result<EstimateResult> {
    cfg.validate(model)?;
    model.with_theta(theta_init)?;
    let (searched, lower, upper) = cfg.searched(model);
    let profile = cfg.profiles(model);
    let scale_index = model.scale_index();

    let full_theta = |x: &[f64]| -> Result<Vec<f64>> {
        let mut theta = theta_init.to_vec();
        for (&i, &v) in searched.iter().zip(x) {
            theta[i] = v;
        }
        if profile {
            theta[scale_index] = profiled_scale(pg, model, &theta, cfg.weight)?;
        }
        Ok(theta)
    };

    if searched.is_empty() {
        let theta = full_theta(&[])?;
        let objective = whittle_objective(pg, model, &theta, cfg.weight)?;
        return Ok(EstimateResult {
            theta_hat: theta,
            objective,
            converged: true,
            evaluations: 1,
            at_boundary: false,
        });
    }

    let bounds = Bounds::new(lower, upper)?;
    let start: Vec<f64> = searched.iter().map(|&i| theta_init[i]).collect();
    if !bounds.contains(&start) {
        return Err(LabError::Validation(format!("initial θ {theta_init:?} is outside the bounds")));
    }
    let opts = NelderMeadOptions {
        simplex_tol: cfg.simplex_tol,
        max_evaluations: cfg.max_evaluations,
        ..NelderMeadOptions::default()
    };
    let res = minimize(
        |x| {
            let theta = full_theta(x)?;
            whittle_objective(pg, model, &theta, cfg.weight)
        },
        &start,
        &bounds,
        &opts,
    )?;
    let theta_hat = full_theta(&res.x)?;
    Ok(EstimateResult {
        theta_hat,
        objective: res.value,
        converged: res.converged,
        evaluations: res.evaluations,
        at_boundary: bounds.on_boundary(&res.x, 10.0 * cfg.simplex_tol),
    })
}

/// Weight function `g(λ, θ)` of an estimating equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatingWeight {
    /// `g = ∂/∂θ f^{-1}(λ, θ) · w(λ)`, one component per listed parameter.
    Whittle { weight: WeightForm },
    /// A parameter-free smoothing function.
    Kernel(SmoothingKernel),
}

/// Central finite-difference step for parameter `θ_i`.
fn fd_step(value: f64) -> f64 {
    1e-6 * (1.0 + value.abs())
}

/// `∫ [I_T(λ) - f(λ,θ)] g(λ,θ) dλ` for each component.
///
/// For [`EstimatingWeight::Whittle`] the components are the parameter indices
/// in `components`; for a kernel there is a single component.
pub fn estimating_equation_residual(
    pg: &Periodogram,
    model: &SpectralModel,
    theta: &[f64],
    g: &EstimatingWeight,
    components: &[usize],
) -> Result<Vec<f64>> {
    let candidate = model.with_theta(theta)?;
    let f = density_grid(pg, &candidate)?;
    let origin = pg.origin_index();
    let weights = pg.trapezoid_weights();
    match g {
        EstimatingWeight::Kernel(kernel) => {
            let mut sum = 0.0;
            for (j, wt) in weights.iter().enumerate() {
                if j == origin {
                    continue;
                }
                sum += wt * (pg.ordinates[j] - f[j]) * kernel.density(pg.frequencies[j])?;
            }
            Ok(vec![sum])
        }
        EstimatingWeight::Whittle { weight } => components
            .iter()
            .map(|&i| {
                if i >= theta.len() {
                    return Err(LabError::Validation(format!("component {i} out of range")));
                }
                let h = fd_step(theta[i]);
                let mut up = theta.to_vec();
                let mut down = theta.to_vec();
                up[i] += h;
                down[i] -= h;
                let f_up = density_grid(pg, &model.with_theta(&up)?)?;
                let f_down = density_grid(pg, &model.with_theta(&down)?)?;
                let mut sum = 0.0;
                for (j, wt) in weights.iter().enumerate() {
                    if j == origin {
                        continue;
                    }
                    let dinv = (1.0 / f_up[j] - 1.0 / f_down[j]) / (2.0 * h);
                    sum += wt * (pg.ordinates[j] - f[j]) * dinv * weight.eval(pg.frequencies[j]);
                }
                Ok(sum)
            })
            .collect(),
    }
}

/// Exponent `p` such that the kernel density behaves like `λ^{-p}` at zero.
fn kernel_origin_exponent(kernel: &SmoothingKernel) -> f64 {
    match kernel.shape {
        KernelShape::Power { gamma } if gamma < 1.0 => 1.0 - gamma,
        _ => 0.0,
    }
}

fn model_origin_exponent(model: &SpectralModel) -> f64 {
    match model {
        SpectralModel::Frbm { u, .. } => 2.0 * u,
        SpectralModel::Scaled { base, .. } => model_origin_exponent(base),
        SpectralModel::Ou { .. } => 0.0,
    }
}

/// `∫_{-∞}^{∞} h(λ) dλ` for an even `h` with an integrable `λ^{-p}` origin
/// singularity; the range is doubled until the next piece adds less than
/// `1e-6` relative.
fn even_integral<F: Fn(f64) -> f64>(h: F, origin_exponent: f64, what: &str) -> Result<f64> {
    let tol = Tolerance::new(1e-14, 1e-10);
    if origin_exponent >= 1.0 {
        return Err(LabError::numerical(
            format!("{what}: integrand is not integrable at the origin (exponent {origin_exponent})"),
            f64::INFINITY,
        ));
    }
    let mut upper = 1.0;
    let mut total = if origin_exponent > 0.0 {
        let q = 1.0 / (1.0 - origin_exponent);
        integrate(
            |mu: f64| if mu <= 0.0 { 0.0 } else { h(mu.powf(q)) * q * mu.powf(q - 1.0) },
            0.0,
            1.0,
            tol,
        )?
        .value
    } else {
        integrate(&h, 0.0, 1.0, tol)?.value
    };
    loop {
        let piece = integrate(&h, upper, 2.0 * upper, tol)?.value;
        total += piece;
        upper *= 2.0;
        if piece.abs() < 1e-6 * total.abs() {
            // remaining tail by the mapped semi-infinite rule
            let tail = integrate_to_infinity(&h, upper, tol)?.value;
            return Ok(2.0 * (total + tail));
        }
        if upper > 1e12 {
            return Err(LabError::numerical(format!("{what}: divergent tail"), piece.abs() / total.abs()));
        }
    }
}

/// `∫ g(λ) f(λ) dλ`, the limit of the smoothed periodogram functional.
pub fn spectral_functional(model: &SpectralModel, kernel: &SmoothingKernel) -> Result<f64> {
    let p = model_origin_exponent(model) + kernel_origin_exponent(kernel);
    even_integral(
        |l| {
            if l == 0.0 {
                return 0.0;
            }
            model.density(l).unwrap_or(f64::NAN) * kernel.density(l).unwrap_or(f64::NAN)
        },
        p,
        "spectral functional",
    )
}

/// `σ² = 16π³ ∫ f²(λ) g²(λ) dλ`.
pub fn asymptotic_variance(model: &SpectralModel, kernel: &SmoothingKernel) -> Result<f64> {
    if kernel.weight == 0.0 {
        return Ok(0.0);
    }
    let p = 2.0 * (model_origin_exponent(model) + kernel_origin_exponent(kernel));
    let integral = even_integral(
        |l| {
            if l == 0.0 {
                return 0.0;
            }
            let f = model.density(l).unwrap_or(f64::NAN);
            let g = kernel.density(l).unwrap_or(f64::NAN);
            f * f * g * g
        },
        p,
        "asymptotic variance",
    )?;
    Ok(16.0 * PI.powi(3) * integral)
}

/// `lim T · Var ∫ g I_T dλ = 4π ∫ f² g² dλ` under the periodogram and
/// covariance normalizations used in this crate; equals
/// [`asymptotic_variance`] divided by `4π²`.
pub fn functional_variance(model: &SpectralModel, kernel: &SmoothingKernel) -> Result<f64> {
    Ok(asymptotic_variance(model, kernel)? / (4.0 * PI * PI))
}
