//! Experiment configuration: the TOML file as written, and the fully
//! resolved form that is embedded in every report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trendlab::simulate::{replication_seed, SamplingGrid};
use trendlab::spectral::{CovarianceDecay, MemoryClass};
use trendlab::whittle::{WeightForm, WhittleConfig};
use trendlab::{LabError, Result, SmoothingKernel, SpectralModel, TrendForm, TrendSpec};

pub const DEFAULT_LADDER: [f64; 4] = [50.0, 100.0, 200.0, 400.0];
pub const DEFAULT_MAX_STEP: f64 = 0.1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub model: SpectralModel,
    #[serde(default)]
    pub trend: TrendSection,
    #[serde(default = "SmoothingKernel::poisson")]
    pub kernel: SmoothingKernel,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub whittle: WhittleSection,
    #[serde(default)]
    pub conditions: ConditionsSection,
}

fn default_replications() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrendSection {
    #[serde(default = "zero_form")]
    pub form: TrendForm,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default = "one")]
    pub beta: f64,
}

fn zero_form() -> TrendForm {
    TrendForm::Zero
}

fn one() -> f64 {
    1.0
}

impl Default for TrendSection {
    fn default() -> Self {
        Self {
            form: TrendForm::Zero,
            scale: 1.0,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_ladder")]
    pub horizons: Vec<f64>,
    /// Largest admissible sampling step; ignored when `points` is set.
    pub max_step: Option<f64>,
    pub points: Option<usize>,
}

fn default_ladder() -> Vec<f64> {
    DEFAULT_LADDER.to_vec()
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            horizons: default_ladder(),
            max_step: None,
            points: None,
        }
    }
}

/// Overrides of [`WhittleConfig::default_for`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhittleSection {
    pub weight: Option<WeightForm>,
    pub free: Option<Vec<usize>>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub profile_scale: Option<bool>,
    pub simplex_tol: Option<f64>,
    pub max_evaluations: Option<usize>,
    pub theta_init: Option<Vec<f64>>,
    /// Which coordinate of θ the robustness statistics summarize.
    pub component: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AlphaInput {
    Power(f64),
    Named(String),
}

/// Inputs of `check-conditions`; anything left out is read off the model,
/// trend and kernel.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsSection {
    pub alpha: Option<AlphaInput>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub memory: Option<String>,
}

/// Everything a run depends on, after defaults and overrides.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub seed: u64,
    pub replications: usize,
    pub workers: usize,
    pub model: SpectralModel,
    pub trend: TrendSpec,
    pub kernel: SmoothingKernel,
    pub grids: Vec<SamplingGrid>,
    pub whittle: WhittleConfig,
    pub theta_init: Vec<f64>,
    pub component: usize,
    pub conditions: ResolvedConditions,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConditions {
    pub alpha: CovarianceDecay,
    pub beta: f64,
    /// `None` when the kernel transform decays faster than any power.
    pub gamma: Option<f64>,
    pub memory: MemoryClass,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Validation(format!("invalid config: {e}")))
    }

    /// Applies defaults and validates every component.
    pub fn resolve(&self, seed: Option<u64>, workers: Option<usize>) -> Result<ResolvedConfig> {
        let model = self.model.clone();
        model.validate()?;
        let trend = TrendSpec::new(self.trend.form, self.trend.scale, self.trend.beta)?;
        self.kernel.validate()?;

        if self.grid.horizons.is_empty() {
            return Err(LabError::Validation("grid.horizons must not be empty".into()));
        }
        let grids = self
            .grid
            .horizons
            .iter()
            .map(|&t| match self.grid.points {
                Some(n) => SamplingGrid::new(t, n),
                None => SamplingGrid::with_max_step(t, self.grid.max_step.unwrap_or(DEFAULT_MAX_STEP)),
            })
            .collect::<Result<Vec<_>>>()?;
        if self.replications < 2 {
            return Err(LabError::Validation("replications must be >= 2".into()));
        }

        let w = &self.whittle;
        let mut whittle = WhittleConfig::default_for(&model);
        if let Some(v) = w.weight {
            whittle.weight = v;
        }
        if let Some(v) = &w.free {
            whittle.free = v.clone();
        }
        if let Some(v) = &w.lower {
            whittle.lower = v.clone();
        }
        if let Some(v) = &w.upper {
            whittle.upper = v.clone();
        }
        if let Some(v) = w.profile_scale {
            whittle.profile_scale = v;
        }
        if let Some(v) = w.simplex_tol {
            whittle.simplex_tol = v;
        }
        if let Some(v) = w.max_evaluations {
            whittle.max_evaluations = v;
        }
        whittle.validate(&model)?;
        let theta_init = w.theta_init.clone().unwrap_or_else(|| model.theta());
        model.with_theta(&theta_init)?;
        let component = w.component.unwrap_or(0);
        if component >= theta_init.len() {
            return Err(LabError::Validation(format!("whittle.component {component} out of range")));
        }

        let c = &self.conditions;
        let alpha = match c.alpha {
            None => model.alpha_decay(),
            Some(AlphaInput::Power(a)) => CovarianceDecay::Power(a),
            Some(AlphaInput::Named(ref s)) if s.eq_ignore_ascii_case("exponential") => CovarianceDecay::Exponential,
            Some(AlphaInput::Named(ref s)) => {
                return Err(LabError::Validation(format!("conditions.alpha must be a number or \"exponential\", got {s}")))
            }
        };
        let gamma = c.gamma.or(Some(self.kernel.gamma()).filter(|g| g.is_finite()));
        let memory = match &c.memory {
            Some(s) => s.parse()?,
            None => model.classify_memory(),
        };
        let conditions = ResolvedConditions {
            alpha,
            beta: c.beta.unwrap_or(trend.beta),
            gamma,
            memory,
        };

        Ok(ResolvedConfig {
            seed: seed.unwrap_or(self.seed),
            replications: self.replications,
            workers: resolve_workers(workers.or(self.workers)),
            model,
            trend,
            kernel: self.kernel,
            grids,
            whittle,
            theta_init,
            component,
            conditions,
        })
    }
}

pub const WORKER_CAP_ENV: &str = "TRENDLAB_MAX_WORKERS";

fn resolve_workers(requested: Option<usize>) -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let n = requested.unwrap_or(available).max(1);
    match std::env::var(WORKER_CAP_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(cap) if cap > 0 => n.min(cap),
        _ => n,
    }
}

impl ResolvedConfig {
    /// Seed of the experiment at ladder position `k`.
    pub fn horizon_seed(&self, k: usize) -> u64 {
        replication_seed(self.seed, k as u64)
    }
}
