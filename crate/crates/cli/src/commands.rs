//! One function per subcommand. Each computes everything first and then
//! hands the results to [`Artifacts`], so files are written from one place.

use std::collections::BTreeMap;

use serde::Serialize;
use trendlab::lab::{
    check_conditions, mc_clt, mc_difference_functional, mc_estimator_robustness, trend_trend_term, variance_bound_term,
    ConditionReport, McReport,
};
use trendlab::periodogram::{compute_periodogram, quadratic_form_functional, smoothed_functional};
use trendlab::simulate::{contaminate, CirculantSampler, SamplingGrid};
use trendlab::stats::{log_log_slope, SampleStats};
use trendlab::whittle::{estimate, estimating_equation_residual, spectral_functional, EstimateResult, EstimatingWeight};
use trendlab::Result;

use crate::config::ResolvedConfig;
use crate::output::{horizon_tag, Artifacts, LinePlot, Series};

#[derive(Serialize)]
struct HorizonSeed {
    horizon: f64,
    points: usize,
    seed: u64,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    config: &'a ResolvedConfig,
    seeds: Vec<HorizonSeed>,
    results: T,
}

fn seeds(cfg: &ResolvedConfig) -> Vec<HorizonSeed> {
    cfg.grids
        .iter()
        .enumerate()
        .map(|(k, g)| HorizonSeed {
            horizon: g.horizon(),
            points: g.points(),
            seed: cfg.horizon_seed(k),
        })
        .collect()
}

fn write_report<T: Serialize>(out: &mut Artifacts, command: &str, cfg: &ResolvedConfig, results: T) -> Result<()> {
    let report = Report {
        command,
        config: cfg,
        seeds: seeds(cfg),
        results,
    };
    out.json("report.json", &report)
}

fn horizons(cfg: &ResolvedConfig) -> Vec<f64> {
    cfg.grids.iter().map(SamplingGrid::horizon).collect()
}

fn ladder_plot(title: &str, y_label: &str, xs: &[f64], series: Vec<(&str, Vec<f64>)>) -> LinePlot {
    LinePlot {
        title: title.into(),
        x_label: "T".into(),
        y_label: y_label.into(),
        log_log: true,
        series: series
            .into_iter()
            .map(|(name, ys)| Series {
                name: name.into(),
                points: xs.iter().cloned().zip(ys).collect(),
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct PathSummary {
    horizon: f64,
    points: usize,
    embedding_size: usize,
    min_eigenvalue: f64,
    clean: SampleStats,
    contaminated: Option<SampleStats>,
}

pub fn simulate(cfg: &ResolvedConfig, out: &mut Artifacts) -> Result<()> {
    let mut summaries = Vec::new();
    for (k, &grid) in cfg.grids.iter().enumerate() {
        let sampler = CirculantSampler::new(&cfg.model, grid)?;
        let y = sampler.sample(cfg.horizon_seed(k));
        let tag = horizon_tag(grid.horizon());
        out.with_writer(&format!("path_{tag}.csv"), |w| y.write_csv(w))?;
        let contaminated = if cfg.trend.is_zero() {
            None
        } else {
            let x = contaminate(&y, &cfg.trend)?;
            out.with_writer(&format!("contaminated_{tag}.csv"), |w| x.write_csv(w))?;
            Some(SampleStats::from_samples(&x.values)?)
        };
        summaries.push(PathSummary {
            horizon: grid.horizon(),
            points: grid.points(),
            embedding_size: sampler.embedding_size(),
            min_eigenvalue: sampler.min_eigenvalue(),
            clean: SampleStats::from_samples(&y.values)?,
            contaminated,
        });
    }
    write_report(out, "simulate", cfg, summaries)
}

#[derive(Serialize)]
struct PeriodogramSummary {
    horizon: f64,
    points: usize,
    smoothed_functional: f64,
    quadratic_form: f64,
    limit: f64,
    integral: f64,
    energy: f64,
    contaminated_smoothed_functional: Option<f64>,
}

pub fn periodogram(cfg: &ResolvedConfig, out: &mut Artifacts) -> Result<()> {
    let limit = spectral_functional(&cfg.model, &cfg.kernel)?;
    let mut summaries = Vec::new();
    for (k, &grid) in cfg.grids.iter().enumerate() {
        let y = CirculantSampler::new(&cfg.model, grid)?.sample(cfg.horizon_seed(k));
        let pg = compute_periodogram(&y);
        let tag = horizon_tag(grid.horizon());
        out.with_writer(&format!("periodogram_{tag}.csv"), |w| pg.write_csv(w))?;
        let contaminated = if cfg.trend.is_zero() {
            None
        } else {
            let px = compute_periodogram(&contaminate(&y, &cfg.trend)?);
            out.with_writer(&format!("periodogram_contaminated_{tag}.csv"), |w| px.write_csv(w))?;
            Some(smoothed_functional(&px, &cfg.kernel)?)
        };
        summaries.push(PeriodogramSummary {
            horizon: grid.horizon(),
            points: grid.points(),
            smoothed_functional: smoothed_functional(&pg, &cfg.kernel)?,
            quadratic_form: quadratic_form_functional(&y, &cfg.kernel),
            limit,
            integral: pg.integral(),
            energy: grid.step() * y.values.iter().map(|v| v * v).sum::<f64>() / grid.horizon(),
            contaminated_smoothed_functional: contaminated,
        });
    }
    write_report(out, "periodogram", cfg, summaries)
}

#[derive(Serialize)]
struct Fit {
    path: &'static str,
    horizon: f64,
    estimate: EstimateResult,
    residual_norm: f64,
}

fn residual_norm(cfg: &ResolvedConfig, pg: &trendlab::Periodogram, theta: &[f64]) -> Result<f64> {
    let g = EstimatingWeight::Whittle {
        weight: cfg.whittle.weight,
    };
    let r = estimating_equation_residual(pg, &cfg.model, theta, &g, &cfg.whittle.free)?;
    Ok(r.iter().map(|v| v * v).sum::<f64>().sqrt())
}

pub fn estimate_cmd(cfg: &ResolvedConfig, out: &mut Artifacts) -> Result<()> {
    let mut fits = Vec::new();
    for (k, &grid) in cfg.grids.iter().enumerate() {
        let y = CirculantSampler::new(&cfg.model, grid)?.sample(cfg.horizon_seed(k));
        let mut paths = vec![("clean", y.clone())];
        if !cfg.trend.is_zero() {
            paths.push(("contaminated", contaminate(&y, &cfg.trend)?));
        }
        for (name, path) in paths {
            let pg = compute_periodogram(&path);
            let est = estimate(&pg, &cfg.model, &cfg.whittle, &cfg.theta_init)?;
            fits.push(Fit {
                path: name,
                horizon: grid.horizon(),
                residual_norm: residual_norm(cfg, &pg, &est.theta_hat)?,
                estimate: est,
            });
        }
    }
    let names = cfg.model.param_names();
    let mut header = vec!["horizon", "contaminated"];
    header.extend(names.iter().copied());
    header.extend(["objective", "converged", "evaluations", "at_boundary", "residual_norm"]);
    let rows: Vec<Vec<f64>> = fits
        .iter()
        .map(|f| {
            let mut row = vec![f.horizon, (f.path == "contaminated") as u8 as f64];
            row.extend(&f.estimate.theta_hat);
            row.extend([
                f.estimate.objective,
                f.estimate.converged as u8 as f64,
                f.estimate.evaluations as f64,
                f.estimate.at_boundary as u8 as f64,
                f.residual_norm,
            ]);
            row
        })
        .collect();
    out.csv("estimates.csv", &header, &rows)?;
    write_report(out, "estimate", cfg, fits)
}

pub fn conditions(cfg: &ResolvedConfig, out: &mut Artifacts) -> Result<ConditionReport> {
    let c = &cfg.conditions;
    let mut report = check_conditions(c.alpha, c.beta, c.gamma.unwrap_or(f64::INFINITY), c.memory)?;
    if c.gamma.is_none() {
        report.gamma = f64::MAX;
        report
            .notes
            .push("kernel transform decays faster than any power; gamma treated as unbounded".into());
    }
    write_report(out, "check-conditions", cfg, &report)?;
    Ok(report)
}

#[derive(Serialize)]
struct LadderRow {
    horizon: f64,
    points: usize,
    trend_term: f64,
    variance_term: f64,
    variance_term_over_t: f64,
    difference: McReport,
    estimator: McReport,
}

#[derive(Serialize)]
struct RobustnessResults {
    ladder: Vec<LadderRow>,
    /// Least-squares log–log slopes against `T`.
    fitted_rates: BTreeMap<String, f64>,
}

pub fn robustness(cfg: &ResolvedConfig, out: &mut Artifacts) -> Result<()> {
    let mut ladder = Vec::new();
    for (k, &grid) in cfg.grids.iter().enumerate() {
        let t = grid.horizon();
        let seed = cfg.horizon_seed(k);
        let j = variance_bound_term(&cfg.trend, &cfg.kernel, &cfg.model, t)?;
        ladder.push(LadderRow {
            horizon: t,
            points: grid.points(),
            trend_term: trend_trend_term(&cfg.trend, &cfg.kernel, t)?,
            variance_term: j.j,
            variance_term_over_t: j.j_over_t,
            difference: mc_difference_functional(&cfg.model, &cfg.trend, &cfg.kernel, grid, cfg.replications, seed)?,
            estimator: mc_estimator_robustness(
                &cfg.model,
                &cfg.trend,
                &cfg.whittle,
                &cfg.theta_init,
                cfg.component,
                grid,
                cfg.replications,
                seed,
            )?,
        });
    }

    let xs = horizons(cfg);
    let column = |f: &dyn Fn(&LadderRow) -> f64| -> Vec<f64> { ladder.iter().map(f).collect() };
    let d = column(&|r| r.trend_term);
    let jt = column(&|r| r.variance_term_over_t);
    let s = column(&|r| r.difference.stats.mean_abs);
    let diff = column(&|r| r.estimator.extra["median_abs_diff"]);
    let err_y = column(&|r| r.estimator.extra["median_abs_error_y"]);
    let err_x = column(&|r| r.estimator.extra["median_abs_error_x"]);

    let mut fitted_rates = BTreeMap::new();
    for (name, ys) in [
        ("trend_term", &d),
        ("variance_term_over_t", &jt),
        ("mean_abs_s", &s),
        ("median_abs_diff", &diff),
        ("median_abs_error_y", &err_y),
    ] {
        let slope = log_log_slope(&xs, ys);
        if slope.is_finite() {
            fitted_rates.insert(name.to_string(), slope);
        }
    }

    for (row, &t) in ladder.iter().zip(&xs) {
        let tag = horizon_tag(t);
        out.with_writer(&format!("difference_{tag}.csv"), |w| row.difference.raw.write_csv(w))?;
        out.with_writer(&format!("estimator_{tag}.csv"), |w| row.estimator.raw.write_csv(w))?;
    }
    let rows: Vec<Vec<f64>> = (0..xs.len())
        .map(|i| vec![xs[i], d[i], jt[i], s[i], diff[i], err_y[i], err_x[i]])
        .collect();
    out.csv(
        "ladder.csv",
        &[
            "horizon",
            "trend_term",
            "variance_term_over_t",
            "mean_abs_s",
            "median_abs_diff",
            "median_abs_error_y",
            "median_abs_error_x",
        ],
        &rows,
    )?;
    out.svg(
        "deterministic_terms.svg",
        &ladder_plot("Deterministic trend terms", "value", &xs, vec![("D(T)", d.clone()), ("J(T)/T", jt.clone())]),
    )?;
    out.svg(
        "monte_carlo.svg",
        &ladder_plot(
            "Paired Monte Carlo statistics",
            "value",
            &xs,
            vec![
                ("mean |S|", s.clone()),
                ("median |dX - dY|", diff.clone()),
                ("median |dY - d*|", err_y.clone()),
            ],
        ),
    )?;
    write_report(out, "robustness", cfg, RobustnessResults { ladder, fitted_rates })
}

pub fn clt(cfg: &ResolvedConfig, out: &mut Artifacts) -> Result<()> {
    let mut reports = Vec::new();
    for (k, &grid) in cfg.grids.iter().enumerate() {
        reports.push(mc_clt(&cfg.model, &cfg.kernel, grid, cfg.replications, cfg.horizon_seed(k))?);
    }
    let xs = horizons(cfg);
    for (r, &t) in reports.iter().zip(&xs) {
        out.with_writer(&format!("clt_{}.csv", horizon_tag(t)), |w| r.raw.write_csv(w))?;
    }
    let rows: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| {
            vec![
                r.horizon,
                r.stats.mean,
                r.stats.variance(),
                r.extra["variance_ratio"],
                r.ks.map_or(f64::NAN, |k| k.p_value),
                r.extra["functional_variance_ratio"],
                r.extra["ks_p_value_functional"],
            ]
        })
        .collect();
    out.csv(
        "clt.csv",
        &[
            "horizon",
            "mean",
            "variance",
            "variance_ratio",
            "ks_p_value",
            "functional_variance_ratio",
            "ks_p_value_functional",
        ],
        &rows,
    )?;
    if xs.len() > 1 {
        let ratio = reports.iter().map(|r| r.extra["functional_variance_ratio"]).collect();
        let var = reports.iter().map(|r| r.stats.variance()).collect();
        out.svg(
            "clt.svg",
            &ladder_plot("Scaled functional variance", "value", &xs, vec![("T Var", var), ("ratio to 4 pi int f^2 g^2", ratio)]),
        )?;
    }
    write_report(out, "clt", cfg, reports)
}
