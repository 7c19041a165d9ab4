//! Robustness-to-trend experiments: the hypothesis checker, the
//! deterministic quantities that control the trend contribution, and the
//! Monte Carlo drivers.

pub mod conditions;
pub mod monte_carlo;
pub mod proof_terms;

pub use conditions::{check_conditions, ConditionReport, Verdict};
pub use monte_carlo::{
    mc_clt, mc_difference_functional, mc_estimator_robustness, McReport, RawTable,
};
pub use proof_terms::{
    nu_function, trend_trend_term, trend_trend_term_with, variance_bound_term, variance_bound_term_with, VarianceBound,
};
