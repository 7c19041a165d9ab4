//! Parametric spectral densities, their covariance functions and memory type.
//!
//! Densities and covariances are paired through
//! `r(t) = ∫ e^{iλt} f(λ) dλ` over the whole real line, with no `2π` factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{LabError, Result};
use crate::quad::{fourier_cos, FourierOptions, Tolerance};

/// Name of a spectral family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Ornstein–Uhlenbeck: `f(λ) = σ²θ / (π(θ² + λ²))`, `r(t) = σ² e^{-θ|t|}`.
    Ou,
    /// Fractional Riesz–Bessel motion: `f(λ) = c / (|λ|^{2u} (1 + λ²)^v)`.
    Frbm,
    /// A base family multiplied by a fixed positive factor.
    Scaled,
}

/// Memory type of a stationary process, read off its covariance integrability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MemoryClass {
    /// Short memory: `r ∈ L¹`, `∫ r ≠ 0`.
    #[serde(rename = "SM")]
    Short,
    /// Intermediate memory (anti-persistent): `r ∈ L¹`, `∫ r = 0`.
    #[serde(rename = "IM")]
    Intermediate,
    /// Long memory: `r ∉ L¹`.
    #[serde(rename = "LM")]
    Long,
}

impl MemoryClass {
    pub fn tag(self) -> &'static str {
        match self {
            MemoryClass::Short => "SM",
            MemoryClass::Intermediate => "IM",
            MemoryClass::Long => "LM",
        }
    }
}

impl std::str::FromStr for MemoryClass {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SM" => Ok(MemoryClass::Short),
            "IM" => Ok(MemoryClass::Intermediate),
            "LM" => Ok(MemoryClass::Long),
            other => Err(LabError::Validation(format!("unknown memory class '{other}'"))),
        }
    }
}

/// How fast the covariance function decays at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceDecay {
    /// `|r(t)| ≤ C |t|^{-α}` with the given `α ∈ (0, 1]`.
    Power(f64),
    /// Faster than any power.
    Exponential,
}

/// A validated spectral density `f(λ, θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralModel {
    Ou { rate: f64, variance: f64 },
    Frbm { u: f64, v: f64, c: f64 },
    Scaled { base: Box<SpectralModel>, factor: f64 },
}

impl SpectralModel {
    pub fn ou(rate: f64, variance: f64) -> Result<Self> {
        let m = SpectralModel::Ou { rate, variance };
        m.validate()?;
        Ok(m)
    }

    pub fn frbm(u: f64, v: f64, c: f64) -> Result<Self> {
        let m = SpectralModel::Frbm { u, v, c };
        m.validate()?;
        Ok(m)
    }

    pub fn scaled(base: SpectralModel, factor: f64) -> Result<Self> {
        let m = SpectralModel::Scaled {
            base: Box::new(base),
            factor,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds a model of the given family from its parameter vector.
    pub fn from_params(family: Family, theta: &[f64]) -> Result<Self> {
        match (family, theta) {
            (Family::Ou, &[rate, variance]) => Self::ou(rate, variance),
            (Family::Frbm, &[u, v, c]) => Self::frbm(u, v, c),
            (Family::Scaled, _) => Err(LabError::Validation(
                "a scaled model needs a base model and a factor".into(),
            )),
            (f, p) => Err(LabError::Validation(format!(
                "family {f:?} expects {} parameters, got {}",
                Self::param_count(f),
                p.len()
            ))),
        }
    }

    fn param_count(family: Family) -> usize {
        match family {
            Family::Ou => 2,
            Family::Frbm => 3,
            Family::Scaled => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        match *self {
            SpectralModel::Ou { rate, variance } => {
                if !finite_pos(rate) || !finite_pos(variance) {
                    return Err(LabError::Validation(format!(
                        "OU needs rate > 0 and variance > 0, got ({rate}, {variance})"
                    )));
                }
            }
            SpectralModel::Frbm { u, v, c } => {
                if !(u > 0.0 && u < 0.5) {
                    return Err(LabError::Validation(format!("fRBm needs 0 < u < 1/2, got u = {u}")));
                }
                if !finite_pos(v) || u + v <= 0.5 {
                    return Err(LabError::Validation(format!(
                        "fRBm needs v > 0 and u + v > 1/2, got u = {u}, v = {v}"
                    )));
                }
                if !finite_pos(c) {
                    return Err(LabError::Validation(format!("fRBm needs c > 0, got {c}")));
                }
            }
            SpectralModel::Scaled { ref base, factor } => {
                if !finite_pos(factor) {
                    return Err(LabError::Validation(format!("scale factor must be > 0, got {factor}")));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        match self {
            SpectralModel::Ou { .. } => Family::Ou,
            SpectralModel::Frbm { .. } => Family::Frbm,
            SpectralModel::Scaled { .. } => Family::Scaled,
        }
    }

    /// Parameter vector: OU `(rate, variance)`, fRBm `(u, v, c)`; a scaled
    /// model exposes the parameters of its base.
    pub fn theta(&self) -> Vec<f64> {
        match self {
            SpectralModel::Ou { rate, variance } => vec![*rate, *variance],
            SpectralModel::Frbm { u, v, c } => vec![*u, *v, *c],
            SpectralModel::Scaled { base, .. } => base.theta(),
        }
    }

    /// Same family with a new parameter vector.
    pub fn with_theta(&self, theta: &[f64]) -> Result<Self> {
        match self {
            SpectralModel::Scaled { base, factor } => Self::scaled(base.with_theta(theta)?, *factor),
            other => Self::from_params(other.family(), theta),
        }
    }

    /// Names of the components of [`theta`](Self::theta).
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            SpectralModel::Ou { .. } => &["rate", "variance"],
            SpectralModel::Frbm { .. } => &["u", "v", "c"],
            SpectralModel::Scaled { base, .. } => base.param_names(),
        }
    }

    /// Index of the parameter that enters `f` as a pure multiplicative factor.
    pub fn scale_index(&self) -> usize {
        match self {
            SpectralModel::Ou { .. } => 1,
            SpectralModel::Frbm { .. } => 2,
            SpectralModel::Scaled { base, .. } => base.scale_index(),
        }
    }

    pub fn alpha_decay(&self) -> CovarianceDecay {
        match self {
            SpectralModel::Ou { .. } => CovarianceDecay::Exponential,
            SpectralModel::Frbm { u, .. } => CovarianceDecay::Power(1.0 - 2.0 * u),
            SpectralModel::Scaled { base, .. } => base.alpha_decay(),
        }
    }

    /// `true` when `f` has a pole at the origin.
    pub fn has_origin_pole(&self) -> bool {
        match self {
            SpectralModel::Ou { .. } => false,
            SpectralModel::Frbm { .. } => true,
            SpectralModel::Scaled { base, .. } => base.has_origin_pole(),
        }
    }

    /// Spectral density `f(λ)`.
    pub fn density(&self, lambda: f64) -> Result<f64> {
        if !lambda.is_finite() {
            return Err(LabError::Domain(format!("frequency must be finite, got {lambda}")));
        }
        match *self {
            SpectralModel::Ou { rate, variance } => {
                Ok(variance * rate / (PI * (rate * rate + lambda * lambda)))
            }
            SpectralModel::Frbm { u, v, c } => {
                if lambda == 0.0 {
                    return Err(LabError::Domain("fRBm density: origin singularity".into()));
                }
                let abs = lambda.abs();
                Ok(c / (abs.powf(2.0 * u) * (1.0 + lambda * lambda).powf(v)))
            }
            SpectralModel::Scaled { ref base, factor } => Ok(factor * base.density(lambda)?),
        }
    }

    /// Covariance `r(t)`; closed form for OU, quadrature of the Fourier
    /// integral for fRBm.
    pub fn covariance(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(LabError::Domain(format!("lag must be finite, got {t}")));
        }
        match *self {
            SpectralModel::Ou { rate, variance } => Ok(variance * (-rate * t.abs()).exp()),
            SpectralModel::Frbm { .. } => self.covariance_by_quadrature(t),
            SpectralModel::Scaled { ref base, factor } => Ok(factor * base.covariance(t)?),
        }
    }

    /// `r(t) = 2 ∫_0^∞ cos(λt) f(λ) dλ` evaluated numerically for any family.
    pub fn covariance_by_quadrature(&self, t: f64) -> Result<f64> {
        let origin_exponent = match self.unscaled() {
            SpectralModel::Frbm { u, .. } => 2.0 * u,
            _ => 0.0,
        };
        let opts = FourierOptions {
            origin_exponent,
            head: 1.0,
            tol: Tolerance::new(1e-13, 1e-9),
            ..FourierOptions::default()
        };
        let r = fourier_cos(
            |x| if x == 0.0 { 0.0 } else { self.density(x).unwrap_or(0.0) },
            t,
            opts,
        )?;
        let value = 2.0 * r.value;
        let error = 2.0 * r.error;
        if error > 1e-6 * value.abs() + 1e-11 {
            let achieved = error / value.abs().max(f64::MIN_POSITIVE);
            return Err(LabError::numerical(
                "covariance quadrature missed relative tolerance 1e-6",
                achieved,
            ));
        }
        Ok(value)
    }

    fn unscaled(&self) -> &SpectralModel {
        match self {
            SpectralModel::Scaled { base, .. } => base.unscaled(),
            other => other,
        }
    }

    pub fn classify_memory(&self) -> MemoryClass {
        match self {
            SpectralModel::Ou { .. } => MemoryClass::Short,
            SpectralModel::Frbm { .. } => MemoryClass::Long,
            SpectralModel::Scaled { base, .. } => base.classify_memory(),
        }
    }
}

/// Leading large-lag term `c · t^{2u-1} · sin(π s) · Γ(1 - 2u)` of the fRBm
/// covariance, where `s` is `sine_argument` (defaults to `u`).
pub fn frbm_covariance_asymptote(model: &SpectralModel, t: f64, sine_argument: Option<f64>) -> Result<f64> {
    let SpectralModel::Frbm { u, v, c } = *model else {
        return Err(LabError::Domain(format!(
            "covariance asymptote is defined for fRBm only, got {:?}",
            model.family()
        )));
    };
    if v <= 0.5 {
        return Err(LabError::Domain(format!("asymptote requires v > 1/2, got {v}")));
    }
    if !(t > 0.0) {
        return Err(LabError::Domain(format!("asymptote requires t > 0, got {t}")));
    }
    let s = sine_argument.unwrap_or(u);
    Ok(c * t.powf(2.0 * u - 1.0) * (PI * s).sin() * gamma(1.0 - 2.0 * u))
}

/// Ratio `r(t) / asymptote(t)` with `r` from quadrature, reported as the
/// fitted constant relating the two.
pub fn frbm_asymptote_ratio(model: &SpectralModel, t: f64) -> Result<f64> {
    let asymptote = frbm_covariance_asymptote(model, t, None)?;
    Ok(model.covariance(t)? / asymptote)
}
