//! Closed-form bounds paired with Monte-Carlo estimators.
//!
//! Every check yields a [`BoundReport`]; reports serialize to one JSON object
//! per line.

mod experiments;
mod gaussian_min;
mod geometric;
mod moving_weight;

pub use experiments::{
    binomial_max_exceed_probability, rs_ceiling_experiment, rs_max_ones, rs_scaled_excess,
    stagnation_experiment, RsCeilingSpec, StagnationSpec,
};
pub use gaussian_min::{min_gaussian_lower_bound, min_gaussian_mc};
pub use geometric::{
    ea_delta, geometric_pmf, geometric_sum_lower_tail_bound, geometric_sum_mc, geometric_tail,
    rls_delta,
};
pub use moving_weight::{
    border_family_max, collision_bound_check, collision_probability_bound, duplicate_mc,
    exact_collision_probability, lemma1_check, moving_weight_cap, moving_weight_raw,
    moving_weight_value, sample_in_m_eps, MarginalPoint,
};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The inputs fall outside the regime the statement covers.
    OutOfRegime,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Only `Fail` counts as a failure.
    pub fn is_failure(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub analytic_value: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub trials: u64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report fields are plain data")
    }
}

/// Mean and standard error of a Bernoulli estimate.
pub(crate) fn proportion(hits: u64, trials: u64) -> (f64, f64) {
    let est = hits as f64 / trials as f64;
    (est, (est * (1.0 - est) / trials as f64).sqrt())
}
