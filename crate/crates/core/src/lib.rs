//! Spectral estimation of continuous-time stationary Gaussian processes and
//! its robustness to small deterministic trends.
//!
//! The crate covers spectral models (Ornstein–Uhlenbeck, fractional
//! Riesz–Bessel motion), exact Gaussian path simulation by circulant
//! embedding, the continuous-time periodogram, Whittle estimation, and the
//! experiments in [`lab`].

pub mod error;
pub mod fft;
pub mod kernel;
pub mod lab;
pub mod optimize;
pub mod periodogram;
pub mod quad;
pub mod simulate;
pub mod spectral;
pub mod stats;
pub mod trend;
pub mod whittle;

pub use error::{LabError, Result};
pub use kernel::{KernelShape, SmoothingKernel};
pub use periodogram::{compute_periodogram, quadratic_form_functional, smoothed_functional, Periodogram};
pub use simulate::{contaminate, sample_gaussian_path, CirculantSampler, PathLabel, SampledPath, SamplingGrid};
pub use spectral::{CovarianceDecay, Family, MemoryClass, SpectralModel};
pub use trend::{TrendForm, TrendSpec};
pub use whittle::{estimate, EstimateResult, WeightForm, WhittleConfig};
