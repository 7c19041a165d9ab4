//! Replicated experiments with paired seeds.
//!
//! Replication `i` always draws its clean path from
//! `replication_seed(base_seed, i)`, so the clean and contaminated statistics
//! of one replication share the same noise. Replications run in parallel and
//! are collected in index order, which keeps reports independent of the
//! worker count.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::proof_terms::trend_trend_term;
use crate::error::{LabError, Result};
use crate::kernel::SmoothingKernel;
use crate::periodogram::{compute_periodogram, fft_frequencies, smoothed_functional_with};
use crate::simulate::{contaminate, replication_seed, CirculantSampler, PathLabel, SampledPath, SamplingGrid};
use crate::spectral::SpectralModel;
use crate::stats::{ks_test_normal, median, KsResult, SampleStats};
use crate::trend::TrendSpec;
use crate::whittle::{asymptotic_variance, estimate, functional_variance, spectral_functional, WhittleConfig};

pub const MIN_DIFFERENCE_REPLICATIONS: usize = 50;
pub const MIN_CLT_REPLICATIONS: usize = 200;
pub const MIN_ROBUSTNESS_REPLICATIONS: usize = 50;

/// Per-replication values, one row per successful replication.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl RawTable {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Summary of one Monte Carlo experiment at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub experiment: String,
    pub horizon: f64,
    pub points: usize,
    /// Replications requested.
    pub replications: usize,
    /// Replications that failed or were excluded.
    pub failures: usize,
    pub base_seed: u64,
    /// Statistics of the headline per-replication quantity.
    pub stats: SampleStats,
    pub ks: Option<KsResult>,
    pub extra: BTreeMap<String, f64>,
    #[serde(skip)]
    pub raw: RawTable,
}

fn require_reps(reps: usize, min: usize, what: &str) -> Result<()> {
    if reps < min {
        return Err(LabError::Validation(format!("{what} needs at least {min} replications, got {reps}")));
    }
    Ok(())
}

fn seeds(base_seed: u64, reps: usize) -> Vec<u64> {
    (0..reps as u64).map(|i| replication_seed(base_seed, i)).collect()
}

/// Distribution of `S = T^{1/2} [∫g I_{T,X} - ∫g I_{T,Y}]` with `X = Y + M`.
///
/// `S` splits into the deterministic `T^{1/2} ∫g I_{T,M}` and a cross term
/// linear in `Y`; both parts are reported.
pub fn mc_difference_functional(
    model: &SpectralModel,
    trend: &TrendSpec,
    kernel: &SmoothingKernel,
    grid: SamplingGrid,
    reps: usize,
    base_seed: u64,
) -> Result<McReport> {
    require_reps(reps, MIN_DIFFERENCE_REPLICATIONS, "difference functional")?;
    trend.validate()?;
    let sampler = CirculantSampler::new(model, grid)?;
    let g = kernel.density_on(&fft_frequencies(&grid))?;
    let root_t = grid.horizon().sqrt();

    let zero_path = SampledPath::new(grid, vec![0.0; grid.points()], PathLabel::Clean, 0)?;
    let trend_path = contaminate(&zero_path, trend)?;
    let trend_term = root_t * smoothed_functional_with(&compute_periodogram(&trend_path), &g);

    let outcomes: Vec<Result<(f64, f64)>> = seeds(base_seed, reps)
        .into_par_iter()
        .map(|seed| {
            let y = sampler.sample(seed);
            let x = contaminate(&y, trend)?;
            let sy = smoothed_functional_with(&compute_periodogram(&y), &g);
            let sx = smoothed_functional_with(&compute_periodogram(&x), &g);
            let s = root_t * (sx - sy);
            Ok((s, s - trend_term))
        })
        .collect();

    let mut raw = RawTable::new(&["S", "cross"]);
    let mut failures = 0;
    for o in outcomes {
        match o {
            Ok((s, c)) if s.is_finite() => raw.rows.push(vec![s, c]),
            _ => failures += 1,
        }
    }
    let s = raw.column("S").unwrap_or_default();
    let cross = SampleStats::from_samples(&raw.column("cross").unwrap_or_default())?;
    let stats = SampleStats::from_samples(&s)?;
    let mut extra = BTreeMap::new();
    extra.insert("mean_abs_s".into(), stats.mean_abs);
    extra.insert("trend_term_discrete".into(), trend_term);
    extra.insert("trend_trend_term".into(), trend_trend_term(trend, kernel, grid.horizon())?);
    extra.insert("cross_mean".into(), cross.mean);
    extra.insert("cross_std_error".into(), cross.std_error);
    Ok(McReport {
        experiment: "difference_functional".into(),
        horizon: grid.horizon(),
        points: grid.points(),
        replications: reps,
        failures,
        base_seed,
        stats,
        ks: None,
        extra,
        raw,
    })
}

/// Distribution of `T^{1/2} [∫g I_{T,Y} - ∫g f]` against its Gaussian limit.
///
/// `ks` tests against `N(0, asymptotic_variance)`; the extra entries also
/// compare with `functional_variance`, the limit variance under the crate's
/// own transform and periodogram normalizations.
pub fn mc_clt(
    model: &SpectralModel,
    kernel: &SmoothingKernel,
    grid: SamplingGrid,
    reps: usize,
    base_seed: u64,
) -> Result<McReport> {
    require_reps(reps, MIN_CLT_REPLICATIONS, "CLT experiment")?;
    let sampler = CirculantSampler::new(model, grid)?;
    let g = kernel.density_on(&fft_frequencies(&grid))?;
    let target = spectral_functional(model, kernel)?;
    let root_t = grid.horizon().sqrt();

    let values: Vec<f64> = seeds(base_seed, reps)
        .into_par_iter()
        .map(|seed| root_t * (smoothed_functional_with(&compute_periodogram(&sampler.sample(seed)), &g) - target))
        .collect();
    let mut raw = RawTable::new(&["Z"]);
    let mut failures = 0;
    for v in values {
        if v.is_finite() {
            raw.rows.push(vec![v]);
        } else {
            failures += 1;
        }
    }
    let z = raw.column("Z").unwrap_or_default();
    let stats = SampleStats::from_samples(&z)?;
    let sigma2 = asymptotic_variance(model, kernel)?;
    let fv = functional_variance(model, kernel)?;
    let ks = ks_test_normal(&z, 0.0, sigma2)?;
    let ks_fv = ks_test_normal(&z, 0.0, fv)?;
    let mut extra = BTreeMap::new();
    extra.insert("target".into(), target);
    extra.insert("sigma2".into(), sigma2);
    extra.insert("variance_ratio".into(), stats.variance() / sigma2);
    extra.insert("functional_variance".into(), fv);
    extra.insert("functional_variance_ratio".into(), stats.variance() / fv);
    extra.insert("ks_statistic_functional".into(), ks_fv.statistic);
    extra.insert("ks_p_value_functional".into(), ks_fv.p_value);
    extra.insert("mean_over_std_error".into(), stats.mean / stats.std_error);
    Ok(McReport {
        experiment: "clt".into(),
        horizon: grid.horizon(),
        points: grid.points(),
        replications: reps,
        failures,
        base_seed,
        stats,
        ks: Some(ks),
        extra,
        raw,
    })
}

/// Paired Whittle estimates from the clean and the contaminated periodogram.
///
/// `model` carries the true `θ*`; `component` selects which coordinate of
/// `θ` is summarized. Replications where either fit fails or does not
/// converge are excluded and counted as failures.
#[allow(clippy::too_many_arguments)]
pub fn mc_estimator_robustness(
    model: &SpectralModel,
    trend: &TrendSpec,
    cfg: &WhittleConfig,
    theta_init: &[f64],
    component: usize,
    grid: SamplingGrid,
    reps: usize,
    base_seed: u64,
) -> Result<McReport> {
    require_reps(reps, MIN_ROBUSTNESS_REPLICATIONS, "estimator robustness")?;
    trend.validate()?;
    cfg.validate(model)?;
    let truth = model.theta();
    if component >= truth.len() {
        return Err(LabError::Validation(format!("component {component} out of range")));
    }
    let sampler = CirculantSampler::new(model, grid)?;
    let outcomes: Vec<Result<Option<(f64, f64)>>> = seeds(base_seed, reps)
        .into_par_iter()
        .map(|seed| {
            let y = sampler.sample(seed);
            let x = contaminate(&y, trend)?;
            let ey = estimate(&compute_periodogram(&y), model, cfg, theta_init)?;
            let ex = estimate(&compute_periodogram(&x), model, cfg, theta_init)?;
            if !(ey.converged && ex.converged) {
                return Ok(None);
            }
            Ok(Some((ey.theta_hat[component], ex.theta_hat[component])))
        })
        .collect();

    let mut raw = RawTable::new(&["theta_y", "theta_x", "diff"]);
    let mut failures = 0;
    for o in outcomes {
        match o {
            Ok(Some((ty, tx))) => raw.rows.push(vec![ty, tx, tx - ty]),
            _ => failures += 1,
        }
    }
    let diff = raw.column("diff").unwrap_or_default();
    let stats = SampleStats::from_samples(&diff)?;
    let star = truth[component];
    let err = |name: &str| -> Vec<f64> {
        raw.column(name)
            .unwrap_or_default()
            .iter()
            .map(|v| (v - star).abs())
            .collect()
    };
    let mut extra = BTreeMap::new();
    extra.insert("theta_star".into(), star);
    extra.insert("median_abs_diff".into(), stats.median_abs);
    extra.insert("median_abs_error_y".into(), median(&err("theta_y")));
    extra.insert("median_abs_error_x".into(), median(&err("theta_x")));
    Ok(McReport {
        experiment: "estimator_robustness".into(),
        horizon: grid.horizon(),
        points: grid.points(),
        replications: reps,
        failures,
        base_seed,
        stats,
        ks: None,
        extra,
        raw,
    })
}
