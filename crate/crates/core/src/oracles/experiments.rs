//! Whole-run experiments: stagnation of RLS and the EA on geometric noise, and
//! the ceiling of random search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::factorial::ln_binomial;

use super::{proportion, BoundReport, Verdict};
use crate::error::{Error, Result};
use crate::landscape::{FrozenLandscape, NoiseModel};
use crate::optimizers::{run, Algorithm, RunOptions, Telemetry};
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct StagnationSpec {
    pub algorithm: Algorithm,
    pub n: usize,
    pub noise: NoiseModel,
    pub runs: u64,
    pub budget: u64,
    /// Runs with more accepted transitions than this count as exceeding.
    pub transition_limit: f64,
    /// Runs whose best popcount exceeds the start by at least this many ones count as gaining.
    pub gain_limit: usize,
    pub allowed_fraction: f64,
    pub master_seed: u64,
}

impl StagnationSpec {
    /// Budget `n^2`, transition limit `ln^2 n`, gain limit `n/8`, 5% allowed.
    pub fn new(
        algorithm: Algorithm,
        n: usize,
        noise: NoiseModel,
        runs: u64,
        master_seed: u64,
    ) -> Self {
        let ln = (n as f64).ln();
        StagnationSpec {
            algorithm,
            n,
            noise,
            runs,
            budget: (n as u64).pow(2),
            transition_limit: ln * ln,
            gain_limit: n / 8,
            allowed_fraction: 0.05,
            master_seed,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n < 2 || self.runs == 0 {
            return Err(Error::precondition(
                "stagnation needs n >= 2 and at least one run",
            ));
        }
        let p_max = match self.algorithm {
            Algorithm::Rls => 0.5,
            Algorithm::Ea => 1.0 / (2.0 * (self.n as f64).ln()),
            other => {
                return Err(Error::precondition(format!(
                    "stagnation covers RLS and the EA, not {other}"
                )))
            }
        };
        match self.noise {
            NoiseModel::None => Ok(()),
            NoiseModel::Geometric { p } if p <= p_max + 1e-12 => Ok(()),
            other => Err(Error::precondition(format!(
                "{} stagnation needs geometric noise with p <= {p_max:.5} (or none as a control), got {other}",
                self.algorithm
            ))),
        }
    }
}

fn seeded_runs(
    algorithm: Algorithm,
    n: usize,
    noise: NoiseModel,
    budget: u64,
    runs: u64,
    master_seed: u64,
) -> Result<Vec<Telemetry>> {
    (0..runs)
        .into_par_iter()
        .map(|r| {
            let landscape_seed = derive_seed(master_seed, "landscape", algorithm.id(), n as u64, r);
            let run_seed = derive_seed(master_seed, "run", algorithm.id(), n as u64, r);
            let landscape = FrozenLandscape::new(n, noise, landscape_seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
            run(algorithm, &landscape, &RunOptions::new(budget), &mut rng)
        })
        .collect()
}

/// Two reports: the fraction of runs exceeding the transition limit, and the
/// fraction gaining `gain_limit` ones over the start (which must be zero).
pub fn stagnation_experiment(spec: &StagnationSpec) -> Result<[BoundReport; 2]> {
    spec.check()?;
    let tel = seeded_runs(
        spec.algorithm,
        spec.n,
        spec.noise,
        spec.budget,
        spec.runs,
        spec.master_seed,
    )?;
    let exceed = tel
        .iter()
        .filter(|t| t.accepted_transitions as f64 > spec.transition_limit)
        .count() as u64;
    let gained = tel
        .iter()
        .filter(|t| t.max_ones_sampled.saturating_sub(t.start_ones) >= spec.gain_limit)
        .count() as u64;
    let most = tel
        .iter()
        .map(|t| t.accepted_transitions)
        .max()
        .unwrap_or(0);
    let improving_exceed = tel
        .iter()
        .filter(|t| t.improving_transitions as f64 > spec.transition_limit)
        .count();
    let label = format!("{} n={} noise={}", spec.algorithm, spec.n, spec.noise);
    let (fe, se) = proportion(exceed, spec.runs);
    let (fg, sg) = proportion(gained, spec.runs);
    Ok([
        BoundReport {
            name: format!("stagnation-transitions {label}"),
            analytic_value: spec.allowed_fraction,
            mc_estimate: fe,
            mc_stderr: se,
            trials: spec.runs,
            verdict: Verdict::from_bool(fe <= spec.allowed_fraction),
            note: Some(format!(
                "limit={:.2} exceeding_runs={exceed} max_transitions={most} \
                 runs_exceeding_with_strict_improvements_only={improving_exceed}",
                spec.transition_limit
            )),
        },
        BoundReport {
            name: format!("stagnation-gain {label}"),
            analytic_value: 0.0,
            mc_estimate: fg,
            mc_stderr: sg,
            trials: spec.runs,
            verdict: Verdict::from_bool(gained == 0),
            note: Some(format!(
                "gain_limit={} gaining_runs={gained}",
                spec.gain_limit
            )),
        },
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub struct RsCeilingSpec {
    pub n: usize,
    pub budget: u64,
    pub runs: u64,
    /// Random search samples uniformly whatever the landscape, so the popcount
    /// statistic does not depend on this; none skips the distortion lookups.
    pub noise: NoiseModel,
    pub limit: f64,
    pub master_seed: u64,
}

impl RsCeilingSpec {
    pub fn new(n: usize, budget: u64, runs: u64, master_seed: u64) -> Self {
        RsCeilingSpec {
            n,
            budget,
            runs,
            noise: NoiseModel::None,
            limit: 3.0,
            master_seed,
        }
    }
}

/// `(max_ones - n/2) / sqrt(n ln n)` for one run.
pub fn rs_scaled_excess(n: usize, max_ones: usize) -> f64 {
    let nf = n as f64;
    (max_ones as f64 - nf / 2.0) / (nf * nf.ln()).sqrt()
}

/// Best popcount of every run.
pub fn rs_max_ones(spec: &RsCeilingSpec) -> Result<Vec<usize>> {
    if spec.n < 2 || spec.runs == 0 || spec.budget == 0 {
        return Err(Error::precondition(
            "rs ceiling needs n >= 2, runs >= 1 and budget >= 1",
        ));
    }
    let tel = seeded_runs(
        Algorithm::Rs,
        spec.n,
        spec.noise,
        spec.budget,
        spec.runs,
        spec.master_seed,
    )?;
    Ok(tel.iter().map(|t| t.max_ones_sampled).collect())
}

/// Maximum scaled excess over runs. Passes when it stays within `limit`;
/// a budget that can enumerate the cube is out of regime.
pub fn rs_ceiling_experiment(spec: &RsCeilingSpec) -> Result<BoundReport> {
    let maxima = rs_max_ones(spec)?;
    let worst = maxima
        .iter()
        .map(|&m| rs_scaled_excess(spec.n, m))
        .fold(f64::NEG_INFINITY, f64::max);
    let exhaustive = spec.n < 64 && spec.budget >= 1u64 << spec.n;
    let exact = binomial_max_exceed_probability(spec.n, spec.budget * spec.runs, spec.limit);
    let verdict = if exhaustive {
        Verdict::OutOfRegime
    } else {
        Verdict::from_bool(worst <= spec.limit)
    };
    Ok(BoundReport {
        name: format!("rs-ceiling n={} budget={}", spec.n, spec.budget),
        analytic_value: spec.limit,
        mc_estimate: worst,
        mc_stderr: 0.0,
        trials: spec.runs,
        verdict,
        note: Some(format!("exact P(any run exceeds limit)={exact:.3e}")),
    })
}

/// Probability that the largest of `draws` independent Binomial(n, 1/2)
/// values exceeds `n/2 + limit sqrt(n ln n)`. Summed exactly in log space.
pub fn binomial_max_exceed_probability(n: usize, draws: u64, limit: f64) -> f64 {
    let nf = n as f64;
    let threshold = nf / 2.0 + limit * (nf * nf.ln()).sqrt();
    let first = threshold.floor() as i64 + 1;
    let log_half = nf * std::f64::consts::LN_2;
    let single: f64 = (first.max(0) as u64..=n as u64)
        .map(|k| (ln_binomial(n as u64, k) - log_half).exp())
        .sum();
    if single >= 1.0 {
        return 1.0;
    }
    -((draws as f64) * (-single).ln_1p()).exp_m1()
}
