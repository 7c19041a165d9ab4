//! Nelder–Mead simplex minimization inside a box.
//!
//! Every trial point is projected onto the box before evaluation, so the
//! simplex never leaves the feasible region. Points where the objective
//! fails are treated as `+∞`.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop once every vertex is within this distance of the best one.
    pub simplex_tol: f64,
    pub max_evaluations: usize,
    /// Initial edge length as a fraction of each box side.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            simplex_tol: 1e-5,
            max_evaluations: 2000,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Axis-aligned box `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(LabError::Validation("bounds have mismatched dimensions".into()));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(LabError::Validation(format!("empty or infinite bound [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| v >= l && v <= u)
    }

    pub fn project(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    /// `true` if any coordinate is within `tol` of a face.
    pub fn on_boundary(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .any(|(v, (l, u))| (v - l).abs() <= tol || (u - v).abs() <= tol)
    }
}

pub fn minimize<F>(objective: F, start: &[f64], bounds: &Bounds, opts: &NelderMeadOptions) -> Result<NelderMeadResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = start.len();
    if n == 0 || bounds.dim() != n {
        return Err(LabError::Validation("start point and bounds dimensions differ".into()));
    }
    if !bounds.contains(start) {
        return Err(LabError::Validation(format!("start point {start:?} is outside the bounds")));
    }
    let evaluations = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| -> f64 {
        evaluations.set(evaluations.get() + 1);
        match objective(x) {
            Ok(v) if v.is_finite() => v,
            _ => f64::INFINITY,
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        let step = opts.initial_step * (bounds.upper[i] - bounds.lower[i]);
        v[i] = if v[i] + step <= bounds.upper[i] { v[i] + step } else { v[i] - step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

    let centroid = |simplex: &[Vec<f64>], skip: usize| -> Vec<f64> {
        let mut c = vec![0.0; n];
        for (k, v) in simplex.iter().enumerate() {
            if k != skip {
                for i in 0..n {
                    c[i] += v[i];
                }
            }
        }
        c.iter_mut().for_each(|x| *x /= n as f64);
        c
    };
    let along = |c: &[f64], w: &[f64], coef: f64| -> Vec<f64> {
        let mut p: Vec<f64> = c.iter().zip(w).map(|(c, w)| c + coef * (w - c)).collect();
        bounds.project(&mut p);
        p
    };

    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        simplex = order.iter().map(|&k| simplex[k].clone()).collect();
        values = order.iter().map(|&k| values[k]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < opts.simplex_tol && values[0].is_finite() {
            converged = true;
            break;
        }
        if evaluations.get() >= opts.max_evaluations {
            break;
        }

        let worst = n;
        let c = centroid(&simplex, worst);
        let reflected = along(&c, &simplex[worst], -1.0);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = along(&c, &simplex[worst], -2.0);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[worst] {
            let p = along(&c, &simplex[worst], -0.5);
            let f = eval(&p);
            (p, f)
        } else {
            let p = along(&c, &simplex[worst], 0.5);
            let f = eval(&p);
            (p, f)
        };
        if fc < values[worst].min(fr) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for k in 1..=n {
            let shrunk = along(&best, &simplex[k], 0.5);
            values[k] = eval(&shrunk);
            simplex[k] = shrunk;
        }
    }
    Ok(NelderMeadResult {
        x: simplex[0].clone(),
        value: values[0],
        evaluations: evaluations.get(),
        converged,
    })
}
