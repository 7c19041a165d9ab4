//! Even smoothing kernels `g(λ)` and their transforms
//! `a(t) = (1/2π) ∫ e^{iλt} g(λ) dλ`.
//!
//! With this normalization the time-domain quadratic form
//! `(1/T) ∬ X(t) X(s) a(t - s) dt ds` equals `∫ g(λ) I_T(λ) dλ` exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quad::{fourier_cos, FourierOptions, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum KernelShape {
    /// `g(λ) = (1/π) / (1 + λ²)`, `a(t) = e^{-|t|} / (2π)`.
    Poisson,
    /// `a(t) = max(0, 1 - |t|/b)`, `g(λ) = b sinc²(λb/2)`.
    Fejer { bandwidth: f64 },
    /// `a(t) = (1 + t²)^{-γ/2}`, `g` computed numerically.
    Power { gamma: f64 },
}

/// A smoothing kernel: a shape times a positive weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingKernel {
    #[serde(flatten)]
    pub shape: KernelShape,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl SmoothingKernel {
    pub fn new(shape: KernelShape) -> Result<Self> {
        let k = Self { shape, weight: 1.0 };
        k.validate()?;
        Ok(k)
    }

    pub fn poisson() -> Self {
        Self {
            shape: KernelShape::Poisson,
            weight: 1.0,
        }
    }

    pub fn fejer(bandwidth: f64) -> Result<Self> {
        Self::new(KernelShape::Fejer { bandwidth })
    }

    pub fn power(gamma: f64) -> Result<Self> {
        Self::new(KernelShape::Power { gamma })
    }

    /// Same shape with the weight multiplied by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            weight: self.weight * factor,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.weight.is_finite() {
            return Err(LabError::Validation(format!("kernel weight must be finite, got {}", self.weight)));
        }
        match self.shape {
            KernelShape::Poisson => Ok(()),
            KernelShape::Fejer { bandwidth } if bandwidth.is_finite() && bandwidth > 0.0 => Ok(()),
            KernelShape::Power { gamma } if gamma.is_finite() && gamma > 0.0 => Ok(()),
            shape => Err(LabError::Validation(format!("invalid kernel parameters {shape:?}"))),
        }
    }

    /// Decay exponent `γ` of `a(t)`; infinite for exponentially decaying or
    /// compactly supported transforms.
    pub fn gamma(&self) -> f64 {
        match self.shape {
            KernelShape::Poisson | KernelShape::Fejer { .. } => f64::INFINITY,
            KernelShape::Power { gamma } => gamma,
        }
    }

    /// `g(λ)`.
    pub fn density(&self, lambda: f64) -> Result<f64> {
        if self.weight == 0.0 {
            return Ok(0.0);
        }
        let x = lambda.abs();
        let value = match self.shape {
            KernelShape::Poisson => 1.0 / (PI * (1.0 + x * x)),
            KernelShape::Fejer { bandwidth } => {
                let half = 0.5 * x * bandwidth;
                if half == 0.0 {
                    bandwidth
                } else {
                    bandwidth * (half.sin() / half).powi(2)
                }
            }
            KernelShape::Power { gamma } => {
                if x == 0.0 && gamma <= 1.0 {
                    return Err(LabError::Domain(format!(
                        "power kernel with gamma = {gamma} has g(0) = infinity"
                    )));
                }
                let opts = FourierOptions {
                    origin_exponent: 0.0,
                    head: 1.0,
                    tol: Tolerance::new(1e-12, 1e-9),
                    ..FourierOptions::default()
                };
                2.0 * fourier_cos(|t: f64| (1.0 + t * t).powf(-0.5 * gamma), x, opts)?.value
            }
        };
        Ok(self.weight * value)
    }

    /// `g` on each frequency of `frequencies`.
    pub fn density_on(&self, frequencies: &[f64]) -> Result<Vec<f64>> {
        frequencies.iter().map(|&l| self.density(l)).collect()
    }

    /// `a(t) = (1/2π) ∫ e^{iλt} g(λ) dλ`.
    pub fn fourier(&self, t: f64) -> f64 {
        let x = t.abs();
        let value = match self.shape {
            KernelShape::Poisson => (-x).exp() / (2.0 * PI),
            KernelShape::Fejer { bandwidth } => (1.0 - x / bandwidth).max(0.0),
            KernelShape::Power { gamma } => (1.0 + x * x).powf(-0.5 * gamma),
        };
        self.weight * value
    }

    /// Points where `a` is not smooth, for quadrature subdivision.
    pub fn fourier_kinks(&self) -> Vec<f64> {
        match self.shape {
            KernelShape::Poisson => vec![0.0],
            KernelShape::Fejer { bandwidth } => vec![-bandwidth, 0.0, bandwidth],
            KernelShape::Power { .. } => Vec::new(),
        }
    }

    /// `max |a(t)| t^γ` over a log grid on `[1, 10³]`; for infinite `γ` the
    /// supremum of `|a(t)| t^{10}` is reported instead.
    pub fn decay_constant(&self) -> f64 {
        let gamma = if self.gamma().is_finite() { self.gamma() } else { 10.0 };
        (0..=300)
            .map(|k| 10f64.powf(3.0 * k as f64 / 300.0))
            .map(|t| self.fourier(t).abs() * t.powf(gamma))
            .fold(0.0, f64::max)
    }
}
