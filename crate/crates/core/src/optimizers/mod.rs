//! RLS, (1+1) EA, cGA and random search behind one step interface.

mod cga;
mod incumbent;
mod random_search;

pub use cga::{Cga, CgaState};
pub use incumbent::{init_balanced_start, IncumbentState, OnePlusOneEa, Rls};
pub use random_search::RandomSearch;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{BitString, FrozenLandscape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rls,
    Ea,
    Cga,
    Rs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Rls, Algorithm::Ea, Algorithm::Cga, Algorithm::Rs];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rls => "rls",
            Algorithm::Ea => "ea",
            Algorithm::Cga => "cga",
            Algorithm::Rs => "rs",
        }
    }

    /// Stable numeric id used when deriving seeds.
    pub fn id(self) -> u64 {
        match self {
            Algorithm::Rls => 1,
            Algorithm::Ea => 2,
            Algorithm::Cga => 3,
            Algorithm::Rs => 4,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rls" => Ok(Algorithm::Rls),
            "ea" | "(1+1)ea" | "oneplusone" => Ok(Algorithm::Ea),
            "cga" => Ok(Algorithm::Cga),
            "rs" | "random" => Ok(Algorithm::Rs),
            other => Err(Error::config(format!(
                "unknown algorithm `{other}` (expected rls, ea, cga or rs)"
            ))),
        }
    }
}

/// A change of the incumbent (RLS/EA) or of the best-so-far point (cGA/RS).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub ones: usize,
    /// Frozen distortion of the new point.
    pub noise: f64,
}

/// What happened in one iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    /// Largest popcount among the points evaluated this iteration.
    pub candidate_ones: usize,
    /// The acceptance test passed. For the EA this includes the zero-flip
    /// candidate `y = x`, which is accepted without a transition.
    pub accepted: bool,
    pub transition: Option<Transition>,
    pub evaluations: u32,
}

impl StepReport {
    pub(crate) fn rejected(candidate_ones: usize, evaluations: u32) -> Self {
        StepReport {
            candidate_ones,
            accepted: false,
            transition: None,
            evaluations,
        }
    }
}

/// One iteration at a time against a frozen landscape.
pub trait Optimizer {
    fn step<R: Rng + ?Sized>(&mut self, landscape: &FrozenLandscape, rng: &mut R) -> StepReport;

    /// Popcount of the point the algorithm would report now.
    fn current_ones(&self) -> usize;

    /// Frozen distortion of that point, when it is a single point.
    fn current_noise(&self) -> f64;

    /// No further iteration can change any statistic.
    fn is_finished(&self) -> bool {
        false
    }

    /// Lowest marginal probability seen during the run (cGA only).
    fn marginal_floor(&self) -> Option<f64> {
        None
    }

    fn current_min_marginal(&self) -> Option<f64> {
        None
    }
}

/// How RLS and the EA pick their first point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartRule {
    /// Exactly `floor(n/2)` ones at uniformly random positions.
    #[default]
    Balanced,
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    /// Iterations; one candidate (RLS/EA/RS) or one sample pair (cGA) each.
    pub budget: u64,
    /// cGA step-size denominator. Must be set for the cGA and only for it.
    pub k: Option<f64>,
    pub start: StartRule,
    pub trace_noise: bool,
    pub trace_marginal_min: bool,
    /// Record the first iteration at which a point with at least this many
    /// ones is sampled.
    pub ones_threshold: Option<usize>,
    /// End the run as soon as `ones_threshold` is reached.
    pub stop_at_threshold: bool,
    /// Count transitions that gain more than this many ones at once.
    pub jump_cap: Option<usize>,
}

impl RunOptions {
    pub fn new(budget: u64) -> Self {
        RunOptions {
            budget,
            k: None,
            start: StartRule::Balanced,
            trace_noise: false,
            trace_marginal_min: false,
            ones_threshold: None,
            stop_at_threshold: false,
            jump_cap: None,
        }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }
}

/// Counters collected over one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Telemetry {
    pub iterations: u64,
    pub evaluations: u64,
    /// Moves of the incumbent to a different point (RLS/EA), or new
    /// best-fitness points (cGA/RS).
    pub accepted_transitions: u64,
    /// Transitions whose new point is strictly fitter than the one it replaces.
    pub improving_transitions: u64,
    /// Largest popcount over every evaluated point.
    pub max_ones_sampled: usize,
    pub final_ones: usize,
    /// Popcount of the starting point (RLS/EA); 0 for the others.
    pub start_ones: usize,
    /// Noise `X_t` of the start point and of each transition's point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_trace: Option<Vec<f64>>,
    /// Minimum marginal after every cGA iteration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marginal_min_trace: Option<Vec<f64>>,
    /// Lowest marginal value reached during the run (cGA only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_marginal: Option<f64>,
    /// Iteration (1-based) at which `ones_threshold` was first reached.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_hit: Option<u64>,
    pub jumps_over_cap: u64,
    /// The cGA stopped early with every marginal at 0 or 1.
    pub absorbed: bool,
}

/// Runs `algorithm` on `landscape` for `options.budget` iterations.
pub fn run<R: Rng + ?Sized>(
    algorithm: Algorithm,
    landscape: &FrozenLandscape,
    options: &RunOptions,
    rng: &mut R,
) -> Result<Telemetry> {
    if options.budget == 0 {
        return Err(Error::config("budget must be at least 1 iteration"));
    }
    match (algorithm, options.k) {
        (Algorithm::Cga, None) => return Err(Error::config("the cGA needs K")),
        (Algorithm::Cga, Some(_)) | (_, None) => {}
        (other, Some(_)) => {
            return Err(Error::config(format!(
                "K only applies to the cGA, not {other}"
            )))
        }
    }
    let n = landscape.n();
    match algorithm {
        Algorithm::Rls | Algorithm::Ea => {
            let start = match options.start {
                StartRule::Balanced => init_balanced_start(n, rng)?,
                StartRule::Uniform => BitString::random(n, rng),
            };
            let state = IncumbentState::new(start, landscape);
            if algorithm == Algorithm::Rls {
                Ok(drive(Rls { state }, landscape, options, rng, true))
            } else {
                Ok(drive(
                    OnePlusOneEa::new(state),
                    landscape,
                    options,
                    rng,
                    true,
                ))
            }
        }
        Algorithm::Cga => {
            let k = options.k.expect("checked above");
            let state = CgaState::new(n, k)?;
            Ok(drive(Cga { state }, landscape, options, rng, false))
        }
        Algorithm::Rs => Ok(drive(RandomSearch::new(n), landscape, options, rng, false)),
    }
}

fn drive<O: Optimizer, R: Rng + ?Sized>(
    mut optimizer: O,
    landscape: &FrozenLandscape,
    options: &RunOptions,
    rng: &mut R,
    has_start_point: bool,
) -> Telemetry {
    let mut tel = Telemetry {
        noise_trace: options.trace_noise.then(Vec::new),
        marginal_min_trace: options.trace_marginal_min.then(Vec::new),
        ..Telemetry::default()
    };
    let mut previous_ones = 0;
    let mut previous_fitness = f64::NEG_INFINITY;
    if has_start_point {
        tel.start_ones = optimizer.current_ones();
        tel.max_ones_sampled = tel.start_ones;
        tel.evaluations = 1;
        previous_ones = tel.start_ones;
        previous_fitness = tel.start_ones as f64 + optimizer.current_noise();
        if let Some(trace) = tel.noise_trace.as_mut() {
            trace.push(optimizer.current_noise());
        }
        if options.ones_threshold.is_some_and(|t| tel.start_ones >= t) {
            tel.threshold_hit = Some(0);
        }
    }

    while tel.iterations < options.budget {
        if tel.threshold_hit.is_some() && options.stop_at_threshold {
            break;
        }
        if optimizer.is_finished() {
            tel.absorbed = true;
            break;
        }
        let report = optimizer.step(landscape, rng);
        tel.iterations += 1;
        tel.evaluations += u64::from(report.evaluations);
        tel.max_ones_sampled = tel.max_ones_sampled.max(report.candidate_ones);
        if tel.threshold_hit.is_none()
            && options
                .ones_threshold
                .is_some_and(|t| report.candidate_ones >= t)
        {
            tel.threshold_hit = Some(tel.iterations);
        }
        if let Some(t) = report.transition {
            tel.accepted_transitions += 1;
            if options
                .jump_cap
                .is_some_and(|cap| t.ones > previous_ones + cap)
            {
                tel.jumps_over_cap += 1;
            }
            let fitness = t.ones as f64 + t.noise;
            if fitness > previous_fitness {
                tel.improving_transitions += 1;
            }
            previous_ones = t.ones;
            previous_fitness = fitness;
            if let Some(trace) = tel.noise_trace.as_mut() {
                trace.push(t.noise);
            }
        }
        if let Some(trace) = tel.marginal_min_trace.as_mut() {
            if let Some(m) = optimizer.current_min_marginal() {
                trace.push(m);
            }
        }
    }
    if optimizer.is_finished() {
        tel.absorbed = true;
    }
    tel.final_ones = optimizer.current_ones();
    tel.min_marginal = optimizer.marginal_floor();
    tel
}

/// `K = sqrt(n) * ln(n)`.
pub fn default_k(n: usize) -> f64 {
    let n = n as f64;
    n.sqrt() * n.ln()
}
