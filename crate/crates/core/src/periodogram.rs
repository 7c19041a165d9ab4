//! Continuous-time periodogram on the FFT grid and smoothed spectral
//! functionals, evaluated both in frequency and in time.

use std::f64::consts::PI;
use std::io::Write;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fft;
use crate::kernel::SmoothingKernel;
use crate::simulate::{SampledPath, SamplingGrid};

/// Ordinates `I_T(λ_j) = (1/2πT) |Δ Σ_k e^{iλ_j t_k} x_k|²` at
/// `λ_j = 2πj/T`, `j = -n/2..=n/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    pub grid: SamplingGrid,
    pub frequencies: Vec<f64>,
    pub ordinates: Vec<f64>,
}

impl Periodogram {
    /// Builds a periodogram from given ordinates on the FFT grid of `grid`.
    ///
    /// Used for synthetic inputs such as `I ≡ f(·, θ)`.
    pub fn from_ordinates(grid: SamplingGrid, ordinates: Vec<f64>) -> Result<Self> {
        let frequencies = fft_frequencies(&grid);
        if ordinates.len() != frequencies.len() {
            return Err(LabError::Validation(format!(
                "expected {} ordinates, got {}",
                frequencies.len(),
                ordinates.len()
            )));
        }
        if ordinates.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(LabError::Validation("periodogram ordinates must be finite and >= 0".into()));
        }
        Ok(Self { grid, frequencies, ordinates })
    }

    /// Ordinates from a function of frequency; the origin gets `origin_value`.
    pub fn from_fn<F: FnMut(f64) -> Result<f64>>(grid: SamplingGrid, origin_value: f64, mut f: F) -> Result<Self> {
        let frequencies = fft_frequencies(&grid);
        let ordinates = frequencies
            .iter()
            .map(|&l| if l == 0.0 { Ok(origin_value) } else { f(l) })
            .collect::<Result<Vec<f64>>>()?;
        Self::from_ordinates(grid, ordinates)
    }

    /// `2π / T`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.grid.horizon()
    }

    /// Index of `λ = 0` in [`frequencies`](Self::frequencies).
    pub fn origin_index(&self) -> usize {
        self.grid.points() / 2
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.grid.step()
    }

    /// Trapezoid weights over the grid (half weight at `±π/Δ`).
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let last = self.frequencies.len() - 1;
        (0..=last)
            .map(|j| if j == 0 || j == last { 0.5 * h } else { h })
            .collect()
    }

    /// Multiplies every ordinate by `factor` (`factor ≥ 0`).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            ordinates: self.ordinates.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Trapezoid approximation of `∫ I_T(λ) dλ` over `[-π/Δ, π/Δ]`.
    pub fn integral(&self) -> f64 {
        self.trapezoid_weights()
            .iter()
            .zip(&self.ordinates)
            .map(|(w, i)| w * i)
            .sum()
    }

    /// Writes the periodogram as `lambda,I` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "lambda,I")?;
        for (l, i) in self.frequencies.iter().zip(&self.ordinates) {
            writeln!(out, "{l},{i}")?;
        }
        Ok(())
    }
}

/// `λ_j = 2πj/T` for `j = -n/2..=n/2`.
pub fn fft_frequencies(grid: &SamplingGrid) -> Vec<f64> {
    let half = (grid.points() / 2) as isize;
    let spacing = 2.0 * PI / grid.horizon();
    (-half..=half).map(|j| j as f64 * spacing).collect()
}

pub fn compute_periodogram(path: &SampledPath) -> Periodogram {
    let grid = path.grid;
    let n = grid.points();
    let step = grid.step();
    let norm = step * step / (2.0 * PI * grid.horizon());
    let mut buf: Vec<Complex64> = path.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    // e^{+iλ_j t_k} = e^{+2πi jk/n}
    fft::inverse(&mut buf);
    let half = n / 2;
    let ordinates = (0..=n)
        .map(|idx| {
            let j = idx as isize - half as isize;
            let bin = j.rem_euclid(n as isize) as usize;
            norm * buf[bin].norm_sqr()
        })
        .collect();
    Periodogram {
        grid,
        frequencies: fft_frequencies(&grid),
        ordinates,
    }
}

/// Periodogram at an arbitrary frequency by direct summation (slow, for checks).
pub fn periodogram_at(path: &SampledPath, lambda: f64) -> f64 {
    let step = path.grid.step();
    let (re, im) = path
        .values
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(re, im), (k, &x)| {
            let phase = lambda * k as f64 * step;
            (re + x * phase.cos(), im + x * phase.sin())
        });
    step * step * (re * re + im * im) / (2.0 * PI * path.grid.horizon())
}

/// `∫ g(λ) I_T(λ) dλ` by the trapezoid rule on the FFT grid up to Nyquist.
pub fn smoothed_functional(pg: &Periodogram, kernel: &SmoothingKernel) -> Result<f64> {
    let g = kernel.density_on(&pg.frequencies)?;
    Ok(smoothed_functional_with(pg, &g))
}

/// Same as [`smoothed_functional`] with `g` already tabulated on the grid.
pub fn smoothed_functional_with(pg: &Periodogram, g: &[f64]) -> f64 {
    assert_eq!(g.len(), pg.ordinates.len(), "kernel table does not match the grid");
    pg.trapezoid_weights()
        .iter()
        .zip(g)
        .zip(&pg.ordinates)
        .map(|((w, g), i)| w * g * i)
        .sum()
}

/// Lag weights `a(mΔ)`, `m = 0..n-1`.
pub fn kernel_lag_table(kernel: &SmoothingKernel, grid: &SamplingGrid) -> Vec<f64> {
    (0..grid.points()).map(|m| kernel.fourier(grid.time(m))).collect()
}

/// `(1/T) Δ² Σ_{j,k} x_j x_k a(t_j - t_k)` through an FFT autocorrelation.
pub fn quadratic_form_functional(path: &SampledPath, kernel: &SmoothingKernel) -> f64 {
    quadratic_form_with(path, &kernel_lag_table(kernel, &path.grid))
}

/// Same as [`quadratic_form_functional`] with `a` already tabulated on lags.
pub fn quadratic_form_with(path: &SampledPath, lags: &[f64]) -> f64 {
    let grid = path.grid;
    let corr = fft::autocorrelation(&path.values);
    let mut sum = lags[0] * corr[0];
    for m in 1..corr.len() {
        sum += 2.0 * lags[m] * corr[m];
    }
    grid.step() * grid.step() * sum / grid.horizon()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::PathLabel;

    fn path_from(values: Vec<f64>, horizon: f64) -> SampledPath {
        let grid = SamplingGrid::new(horizon, values.len()).unwrap();
        SampledPath::new(grid, values, PathLabel::Clean, 0).unwrap()
    }

    #[test]
    fn zero_path_gives_zero_everywhere() {
        let p = path_from(vec![0.0; 128], 10.0);
        let pg = compute_periodogram(&p);
        assert!(pg.ordinates.iter().all(|&v| v == 0.0));
        let k = SmoothingKernel::poisson();
        assert_eq!(smoothed_functional(&pg, &k).unwrap(), 0.0);
        assert_eq!(quadratic_form_functional(&p, &k), 0.0);
    }

    #[test]
    fn fft_matches_direct_summation() {
        let n = 128;
        let horizon = 20.0;
        let grid = SamplingGrid::new(horizon, n).unwrap();
        let lambda1 = 2.0 * PI / horizon;
        let values: Vec<f64> = (0..n).map(|k| (lambda1 * grid.time(k)).cos()).collect();
        let p = path_from(values, horizon);
        let pg = compute_periodogram(&p);
        for (l, i) in pg.frequencies.iter().zip(&pg.ordinates) {
            assert!((periodogram_at(&p, *l) - i).abs() < 1e-10);
        }
        // all energy sits at ±λ_1: |Δ n/2|² / (2πT)
        let peak = (grid.step() * n as f64 / 2.0).powi(2) / (2.0 * PI * horizon);
        let at = |j: isize| pg.ordinates[(pg.origin_index() as isize + j) as usize];
        assert!((at(1) - peak).abs() < 1e-10);
        assert!((at(-1) - peak).abs() < 1e-10);
        assert!(at(0).abs() < 1e-20 && at(2).abs() < 1e-20);
    }

    #[test]
    fn single_spike_quadratic_form() {
        let mut values = vec![0.0; 64];
        values[0] = 1.0;
        let p = path_from(values, 8.0);
        let k = SmoothingKernel::poisson();
        let step = p.grid.step();
        let expected = step * step * k.fourier(0.0) / 8.0;
        assert!((quadratic_form_functional(&p, &k) - expected).abs() < 1e-16);
    }

    #[test]
    fn smoothed_functional_is_linear_in_kernel() {
        let values: Vec<f64> = (0..256).map(|k| ((k * 37 % 17) as f64 - 8.0) / 5.0).collect();
        let p = path_from(values, 30.0);
        let pg = compute_periodogram(&p);
        let k = SmoothingKernel::poisson();
        let one = smoothed_functional(&pg, &k).unwrap();
        let two = smoothed_functional(&pg, &k.scaled(2.0)).unwrap();
        assert_eq!(two, 2.0 * one);
    }

    #[test]
    fn ordinates_even_and_nonnegative() {
        let values: Vec<f64> = (0..128).map(|k| (k as f64 * 0.37).sin() + 0.2).collect();
        let pg = compute_periodogram(&path_from(values, 12.0));
        let last = pg.ordinates.len() - 1;
        for j in 0..=last {
            assert!(pg.ordinates[j] >= 0.0);
            assert!((pg.ordinates[j] - pg.ordinates[last - j]).abs() <= 1e-12 * pg.ordinates[j].max(1.0));
        }
        assert!((pg.frequencies.last().unwrap() - pg.nyquist()).abs() < 1e-12 * pg.nyquist());
    }
}
