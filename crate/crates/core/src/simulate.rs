//! Exact Gaussian sampling of stationary paths on a uniform grid by circulant
//! embedding, and trend contamination `X = Y + M`.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fft;
use crate::spectral::SpectralModel;
use crate::trend::TrendSpec;

/// Minimum number of grid points.
pub const MIN_POINTS: usize = 64;

/// Embedding size is doubled at most this many times before giving up.
pub const MAX_EMBEDDING_DOUBLINGS: usize = 3;

/// Relative threshold below which a negative embedding eigenvalue is an error.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-8;

/// Uniform grid `t_k = kΔ`, `k = 0..n-1`, with `Δ = T / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    horizon: f64,
    points: usize,
}

impl SamplingGrid {
    pub fn new(horizon: f64, points: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(LabError::Validation(format!("horizon T must be > 0, got {horizon}")));
        }
        if points < MIN_POINTS || !points.is_power_of_two() {
            return Err(LabError::Validation(format!(
                "point count must be a power of two >= {MIN_POINTS}, got {points}"
            )));
        }
        Ok(Self { horizon, points })
    }

    /// Smallest admissible grid on `[0, T]` whose step does not exceed `max_step`.
    pub fn with_max_step(horizon: f64, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0) {
            return Err(LabError::Validation(format!("max step must be > 0, got {max_step}")));
        }
        let needed = (horizon / max_step).ceil().max(1.0) as usize;
        Self::new(horizon, needed.next_power_of_two().max(MIN_POINTS))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.points as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|k| self.time(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PathLabel {
    Clean,
    Contaminated,
}

/// A discretized realization on a [`SamplingGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPath {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
    pub label: PathLabel,
    pub seed: u64,
}

impl SampledPath {
    pub fn new(grid: SamplingGrid, values: Vec<f64>, label: PathLabel, seed: u64) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(LabError::Validation(format!(
                "path has {} values but the grid has {} points",
                values.len(),
                grid.points()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::Validation(format!("path value {bad} is not finite")));
        }
        Ok(Self { grid, values, label, seed })
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Writes the path as two-column `t,value` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,value")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{}", self.grid.time(k), v)?;
        }
        Ok(())
    }
}

/// Per-replication seed derived from a base seed (SplitMix64 mixing).
pub fn replication_seed(base_seed: u64, replication: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(base_seed) ^ replication.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Gaussian sampler for one model on one grid; the embedding spectrum is
/// computed once and reused for every seed.
#[derive(Debug, Clone)]
pub struct CirculantSampler {
    grid: SamplingGrid,
    /// `sqrt(max(λ_k, 0) / m)` for the embedding eigenvalues `λ_k`.
    amplitudes: Vec<f64>,
    min_eigenvalue: f64,
}

impl CirculantSampler {
    pub fn new(model: &SpectralModel, grid: SamplingGrid) -> Result<Self> {
        model.validate()?;
        let n = grid.points();
        let step = grid.step();
        let mut size = 2 * n;
        let mut lags: Vec<f64> = Vec::new();
        let mut last_err = None;
        for _ in 0..=MAX_EMBEDDING_DOUBLINGS {
            let half = size / 2;
            if lags.len() < half + 1 {
                let start = lags.len();
                let extra: Result<Vec<f64>> = (start..=half)
                    .into_par_iter()
                    .map(|k| model.covariance(k as f64 * step))
                    .collect();
                lags.extend(extra?);
            }
            let mut buf: Vec<Complex64> = (0..size)
                .map(|j| {
                    let k = if j <= half { j } else { size - j };
                    Complex64::new(lags[k], 0.0)
                })
                .collect();
            fft::forward(&mut buf);
            let eig: Vec<f64> = buf.iter().map(|z| z.re).collect();
            let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            if min >= -EIGENVALUE_TOLERANCE * max {
                let amplitudes = eig
                    .iter()
                    .map(|&l| (l.max(0.0) / size as f64).sqrt())
                    .collect();
                return Ok(Self {
                    grid,
                    amplitudes,
                    min_eigenvalue: min,
                });
            }
            last_err = Some(LabError::EmbeddingNotPsd {
                min_eigenvalue: min,
                size,
            });
            size *= 2;
        }
        Err(last_err.expect("at least one embedding attempt"))
    }

    pub fn grid(&self) -> SamplingGrid {
        self.grid
    }

    pub fn embedding_size(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// One zero-mean Gaussian path with covariance `[r((j-k)Δ)]`.
    pub fn sample(&self, seed: u64) -> SampledPath {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf: Vec<Complex64> = self
            .amplitudes
            .iter()
            .map(|&a| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(a * re, a * im)
            })
            .collect();
        fft::forward(&mut buf);
        let values = buf.iter().take(self.grid.points()).map(|z| z.re).collect();
        SampledPath {
            grid: self.grid,
            values,
            label: PathLabel::Clean,
            seed,
        }
    }
}

/// One realization of the centered Gaussian process with spectral density `model`.
pub fn sample_gaussian_path(model: &SpectralModel, grid: SamplingGrid, seed: u64) -> Result<SampledPath> {
    Ok(CirculantSampler::new(model, grid)?.sample(seed))
}

/// `X(t_k) = Y(t_k) + M(t_k)`.
pub fn contaminate(path: &SampledPath, trend: &TrendSpec) -> Result<SampledPath> {
    if path.label == PathLabel::Contaminated {
        return Err(LabError::Usage("path is already contaminated".into()));
    }
    let values = path
        .values
        .iter()
        .enumerate()
        .map(|(k, &y)| y + trend.eval(path.grid.time(k)))
        .collect();
    Ok(SampledPath {
        grid: path.grid,
        values,
        label: PathLabel::Contaminated,
        seed: path.seed,
    })
}
