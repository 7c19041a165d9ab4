//! Deterministic small trends `M(t)` with `|M(t)| ≤ C t^{-β}`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Shape of the trend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendForm {
    /// `M(t) = C (1 + t)^{-β}`.
    ShiftedPower,
    /// `M(t) = 0`.
    Zero,
}

/// A validated trend specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendSpec {
    pub form: TrendForm,
    pub scale: f64,
    pub beta: f64,
}

/// Outcome of [`TrendSpec::verify_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// `max |M(t)| t^β / C` over the grid.
    pub max_ratio: f64,
}

impl TrendSpec {
    pub fn new(form: TrendForm, scale: f64, beta: f64) -> Result<Self> {
        let spec = Self { form, scale, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn shifted_power(scale: f64, beta: f64) -> Result<Self> {
        Self::new(TrendForm::ShiftedPower, scale, beta)
    }

    pub fn zero() -> Self {
        Self {
            form: TrendForm::Zero,
            scale: 0.0,
            beta: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(LabError::Validation(format!("trend scale C must be >= 0, got {}", self.scale)));
        }
        if !(self.beta.is_finite() && self.beta > 0.25) {
            return Err(LabError::Validation(format!(
                "trend decay exponent beta = {} violates the hypothesis beta > 1/4 of the robustness theorem",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.form == TrendForm::Zero || self.scale == 0.0
    }

    /// `M(t)` for `t ≥ 0`.
    pub fn eval(&self, t: f64) -> f64 {
        match self.form {
            TrendForm::Zero => 0.0,
            TrendForm::ShiftedPower => self.scale * (1.0 + t).powf(-self.beta),
        }
    }

    /// Checks `|M(t)| ≤ C t^{-β}` on positive grid times.
    pub fn verify_bound(&self, grid: &[f64]) -> BoundCheck {
        verify_bound_of(|t| self.eval(t), self.scale, self.beta, grid)
    }
}

/// Bound check for an arbitrary function against `C t^{-β}`.
pub fn verify_bound_of<F: Fn(f64) -> f64>(m: F, scale: f64, beta: f64, grid: &[f64]) -> BoundCheck {
    let mut holds = true;
    let mut max_ratio: f64 = 0.0;
    for &t in grid {
        let value = m(t).abs();
        let bound = scale * t.powf(-beta);
        if value > bound {
            holds = false;
        }
        let ratio = if scale > 0.0 {
            value * t.powf(beta) / scale
        } else if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        max_ratio = max_ratio.max(ratio);
    }
    BoundCheck { holds, max_ratio }
}
