//! Adaptive Gauss–Kronrod quadrature and Fourier cosine integrals.
//!
//! The adaptive driver follows the QUADPACK `qag` scheme with the 21-point
//! Kronrod rule: bisect the interval with the largest error estimate until
//! the summed estimate meets `max(abs, rel * |I|)`.
//!
//! [`fourier_cos`] evaluates `∫_0^∞ h(λ) cos(λt) dλ` for densities that may
//! have an integrable power singularity at the origin. The head of the range
//! is integrated directly (after a change of variables that removes the
//! singularity), the oscillatory tail is cut into half periods and the
//! partial sums are accelerated with Wynn's epsilon algorithm.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{LabError, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Requested accuracy for an adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of subintervals kept by the adaptive driver.
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 4000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-12, 1e-10)
    }
}

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One application of the 21-point Kronrod rule on `[a, b]`.
///
/// Returns `(kronrod estimate, error estimate)`.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs_sum = WGK[10] * fc.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let result = kronrod * half;
    let resabs = abs_sum * h;
    let resasc = asc * h;
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Adaptive integral over `[points[0], points[last]]`, starting from the
/// subdivision given by `points` (kinks and singularities go there).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(LabError::Domain("integration needs at least two points".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (v, e) = gk21(&f, a, b);
        evaluations += 21;
        value += v;
        error += e;
        heap.push(Segment { a, b, value: v, error: e });
    }
    while error > tol.target(value) {
        if heap.len() >= tol.max_intervals {
            return Err(LabError::numerical(
                format!("adaptive quadrature exceeded {} subintervals", tol.max_intervals),
                error,
            ));
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(worst);
            return Err(LabError::numerical("quadrature interval underflow", error));
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        evaluations += 42;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
    if !value.is_finite() {
        return Err(LabError::numerical("quadrature produced a non-finite value", error));
    }
    Ok(QuadResult { value, error, evaluations })
}

/// Adaptive integral of `f` over `[a, ∞)` via `λ = a + (1 - u) / u`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<QuadResult> {
    let mapped = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = a + (1.0 - u) / u;
        f(x) / (u * u)
    };
    integrate(mapped, 0.0, 1.0, tol)
}

/// Incremental Wynn epsilon table for accelerating a sequence of partial sums.
#[derive(Debug, Clone, Default)]
pub struct WynnEpsilon {
    diagonal: Vec<f64>,
    max_columns: usize,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self {
            diagonal: Vec::new(),
            max_columns: 40,
        }
    }

    /// Adds the next partial sum and returns the current extrapolated limit.
    pub fn push(&mut self, sum: f64) -> f64 {
        let mut next = Vec::with_capacity(self.diagonal.len() + 1);
        next.push(sum);
        let limit = self.diagonal.len().min(self.max_columns);
        for k in 0..limit {
            let before = if k == 0 { 0.0 } else { self.diagonal[k - 1] };
            let delta = next[k] - self.diagonal[k];
            if delta == 0.0 || !delta.is_finite() {
                break;
            }
            let value = before + 1.0 / delta;
            if !value.is_finite() {
                break;
            }
            next.push(value);
        }
        self.diagonal = next;
        let top = (self.diagonal.len() - 1) & !1;
        self.diagonal[top]
    }
}

/// Options for [`fourier_cos`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierOptions {
    /// Exponent `p ∈ [0, 1)` of an integrable singularity `h(λ) ~ λ^{-p}` at the origin.
    pub origin_exponent: f64,
    /// Frequency beyond which the half-period tail summation starts.
    pub head: f64,
    pub tol: Tolerance,
    /// Maximum number of half periods summed in the tail.
    pub max_periods: usize,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self {
            origin_exponent: 0.0,
            head: 10.0,
            tol: Tolerance::new(1e-13, 1e-10),
            max_periods: 4000,
        }
    }
}

/// Integral over `[0, b]` of `h`, removing a `λ^{-p}` singularity at zero with
/// the substitution `λ = μ^{1/(1-p)}`.
fn integrate_from_origin<F: Fn(f64) -> f64>(h: &F, b: f64, p: f64, tol: Tolerance) -> Result<QuadResult> {
    if p == 0.0 {
        return integrate(h, 0.0, b, tol);
    }
    let q = 1.0 / (1.0 - p);
    let upper = b.powf(1.0 - p);
    integrate(
        |mu: f64| {
            if mu <= 0.0 {
                return 0.0;
            }
            let lambda = mu.powf(q);
            h(lambda) * q * mu.powf(q - 1.0)
        },
        0.0,
        upper,
        tol,
    )
}

/// `∫_0^∞ h(λ) cos(λt) dλ` for an integrable, eventually monotone `h`.
pub fn fourier_cos<F: Fn(f64) -> f64>(h: F, t: f64, opts: FourierOptions) -> Result<QuadResult> {
    let t = t.abs();
    let p = opts.origin_exponent;
    if !(0.0..1.0).contains(&p) {
        return Err(LabError::Domain(format!("origin exponent {p} outside [0, 1)")));
    }
    if t == 0.0 {
        let head = integrate_from_origin(&h, opts.head, p, opts.tol)?;
        let tail = integrate_to_infinity(&h, opts.head, opts.tol)?;
        return Ok(QuadResult {
            value: head.value + tail.value,
            error: head.error + tail.error,
            evaluations: head.evaluations + tail.evaluations,
        });
    }
    let half_period = std::f64::consts::PI / t;
    let periods_in_head = (opts.head / half_period).ceil().max(1.0);
    let head_end = periods_in_head * half_period;
    let integrand = |x: f64| h(x) * (x * t).cos();
    let head = if p == 0.0 {
        let breaks: Vec<f64> = (0..=periods_in_head as usize)
            .map(|k| k as f64 * half_period)
            .collect();
        integrate_with_breaks(&integrand, &breaks, opts.tol)?
    } else {
        let first = integrate_from_origin(&integrand, half_period, p, opts.tol)?;
        if periods_in_head > 1.0 {
            let breaks: Vec<f64> = (1..=periods_in_head as usize)
                .map(|k| k as f64 * half_period)
                .collect();
            let rest = integrate_with_breaks(&integrand, &breaks, opts.tol)?;
            QuadResult {
                value: first.value + rest.value,
                error: first.error + rest.error,
                evaluations: first.evaluations + rest.evaluations,
            }
        } else {
            first
        }
    };

    let mut evaluations = head.evaluations;
    let mut sum = head.value;
    let mut wynn = WynnEpsilon::new();
    let mut estimates = vec![wynn.push(sum)];
    let scale = head.value.abs().max(opts.tol.abs);
    for k in 0..opts.max_periods {
        let a = head_end + k as f64 * half_period;
        let piece = integrate(&integrand, a, a + half_period, Tolerance { rel: 1e-12, ..opts.tol })?;
        evaluations += piece.evaluations;
        sum += piece.value;
        let est = wynn.push(sum);
        estimates.push(est);
        let n = estimates.len();
        if n >= 12 {
            let d1 = (estimates[n - 1] - estimates[n - 2]).abs();
            let d2 = (estimates[n - 2] - estimates[n - 3]).abs();
            let target = opts.tol.abs.max(opts.tol.rel * est.abs()).max(1e-15 * scale);
            if d1 <= target && d2 <= target {
                return Ok(QuadResult {
                    value: est,
                    error: d1.max(d2) + head.error,
                    evaluations,
                });
            }
        }
    }
    let n = estimates.len();
    Err(LabError::numerical(
        "oscillatory tail extrapolation did not converge",
        (estimates[n - 1] - estimates[n - 2]).abs(),
    ))
}
