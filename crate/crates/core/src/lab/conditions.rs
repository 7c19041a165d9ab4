use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spectral::{CovarianceDecay, MemoryClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    TheoremApplies,
    NotCovered,
}

/// Which hypotheses of the robustness theorem hold for `(α, β, γ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub alpha: CovarianceDecay,
    /// `α` actually used in the inequalities.
    pub alpha_used: f64,
    pub beta: f64,
    pub gamma: f64,
    pub memory: MemoryClass,
    /// `2β + γ > 3/2` and `β > 1/4`.
    pub base: bool,
    /// `β + γ > 1`.
    pub case_i: bool,
    /// `α + γ ≥ 3/2`, and `α + 2β > 1` whenever `β < 1 < γ`.
    pub case_ii: bool,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Evaluates the trend, kernel and covariance conditions.
///
/// An exponentially decaying covariance is treated as `α = 1`.
pub fn check_conditions(alpha: CovarianceDecay, beta: f64, gamma: f64, memory: MemoryClass) -> Result<ConditionReport> {
    if !(beta > 0.0) || beta.is_nan() {
        return Err(LabError::Validation(format!("beta must be > 0, got {beta}")));
    }
    if !(gamma > 0.0) || gamma.is_nan() {
        return Err(LabError::Validation(format!("gamma must be > 0, got {gamma}")));
    }
    let mut notes = Vec::new();
    let alpha_used = match alpha {
        CovarianceDecay::Power(a) => {
            if !(a > 0.0 && a <= 1.0) {
                return Err(LabError::Validation(format!("alpha must lie in (0, 1], got {a}")));
            }
            a
        }
        CovarianceDecay::Exponential => {
            notes.push("exponential covariance decay mapped to alpha = 1".to_string());
            1.0
        }
    };
    let base = 2.0 * beta + gamma > 1.5 && beta > 0.25;
    let case_i = beta + gamma > 1.0;
    let side = if beta < 1.0 && 1.0 < gamma {
        alpha_used + 2.0 * beta > 1.0
    } else {
        true
    };
    let case_ii = alpha_used + gamma >= 1.5 && side;
    let applies = base
        && match memory {
            MemoryClass::Short | MemoryClass::Intermediate => case_i,
            MemoryClass::Long => case_ii,
        };
    Ok(ConditionReport {
        alpha,
        alpha_used,
        beta,
        gamma,
        memory,
        base,
        case_i,
        case_ii,
        verdict: if applies { Verdict::TheoremApplies } else { Verdict::NotCovered },
        notes,
    })
}
