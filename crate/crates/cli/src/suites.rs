//! The oracle checks behind `rugged verify`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rugged_onemax::landscape::{geometric_p_for_variance, NoiseModel};
use rugged_onemax::optimizers::Algorithm;
use rugged_onemax::oracles::{
    border_family_max, collision_bound_check, duplicate_mc, ea_delta, geometric_sum_mc,
    lemma1_check, min_gaussian_mc, rls_delta, rs_ceiling_experiment, stagnation_experiment,
    BoundReport, RsCeilingSpec, StagnationSpec,
};
use rugged_onemax::seed::derive_seed;
use rugged_onemax::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Collision,
    Gaussmin,
    Tails,
    Stagnation,
    RsCeiling,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = [
        "lemma1",
        "collision",
        "gaussmin",
        "tails",
        "stagnation",
        "rs-ceiling",
        "all",
    ];

    const EACH: [Suite; 6] = [
        Suite::Lemma1,
        Suite::Collision,
        Suite::Gaussmin,
        Suite::Tails,
        Suite::Stagnation,
        Suite::RsCeiling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Collision => "collision",
            Suite::Gaussmin => "gaussmin",
            Suite::Tails => "tails",
            Suite::Stagnation => "stagnation",
            Suite::RsCeiling => "rs-ceiling",
            Suite::All => "all",
        }
    }

    /// What `--trials` means when it is not given.
    pub fn default_trials(self) -> Option<u64> {
        match self {
            Suite::Lemma1 => Some(1_000_000),
            Suite::Collision => Some(100),
            Suite::Gaussmin => Some(1_000_000),
            Suite::Tails => Some(20_000),
            Suite::Stagnation | Suite::RsCeiling => Some(100),
            Suite::All => None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::NAMES
            .iter()
            .position(|&name| name == s)
            .map(|i| if i == 6 { Suite::All } else { Suite::EACH[i] })
            .ok_or_else(|| {
                format!(
                    "unknown suite `{s}`; valid suites: {}",
                    Suite::NAMES.join(", ")
                )
            })
    }
}

fn cell_rng(seed: u64, suite: Suite, n: usize, cell: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, suite.name(), 0, n as u64, cell))
}

/// Runs one suite (or all of them). `trials` overrides each suite's default
/// count: samples per cell for lemma1, multisets for collision, draws per
/// cell for gaussmin and tails, runs for stagnation and rs-ceiling.
pub fn run_suite(suite: Suite, trials: Option<u64>, seed: u64) -> Result<Vec<BoundReport>> {
    if suite == Suite::All {
        let mut all = Vec::new();
        for s in Suite::EACH {
            all.extend(run_suite(s, trials, seed)?);
        }
        return Ok(all);
    }
    let trials = trials
        .or(suite.default_trials())
        .expect("single suites have defaults");
    if trials == 0 {
        return Err(Error::Config("--trials must be at least 1".into()));
    }
    match suite {
        Suite::Lemma1 => lemma1(trials, seed),
        Suite::Collision => collision(trials, seed),
        Suite::Gaussmin => gaussmin(trials, seed),
        Suite::Tails => tails(trials, seed),
        Suite::Stagnation => stagnation(trials, seed),
        Suite::RsCeiling => rs_ceiling(trials, seed),
        Suite::All => unreachable!("handled above"),
    }
}

pub const LEMMA1_N: [usize; 4] = [4, 8, 16, 64];
pub const LEMMA1_EPS: [f64; 3] = [0.1, 0.25, 0.5];

fn lemma1(samples: u64, seed: u64) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for (i, &n) in LEMMA1_N.iter().enumerate() {
        for (j, &eps) in LEMMA1_EPS.iter().enumerate() {
            let mut rng = cell_rng(seed, Suite::Lemma1, n, (i * 3 + j) as u64);
            out.push(lemma1_check(n, eps, samples, &mut rng)?);
        }
    }
    Ok(out)
}

/// Bound against the exact product on 10^4 pairs, then duplicate counting at
/// n = 200, eps = 0.25, S = 10^4 with the strings alternating between the two
/// members of the worst vertex pair.
fn collision(trials: u64, seed: u64) -> Result<Vec<BoundReport>> {
    let mut rng = cell_rng(seed, Suite::Collision, 64, 0);
    let bound = collision_bound_check(64, 0.25, 10_000, &mut rng)?;
    let (_, p, q) = border_family_max(200, 0.25)?;
    let mut rng = cell_rng(seed, Suite::Collision, 200, 1);
    let dup = duplicate_mc(&[p, q], 0.25, 10_000, trials, &mut rng)?;
    Ok(vec![bound, dup])
}

pub const GAUSSMIN_N: [u64; 3] = [10, 100, 1000];
pub const GAUSSMIN_C: [f64; 3] = [0.01, 0.1, 0.0];

fn gaussmin(trials: u64, seed: u64) -> Result<Vec<BoundReport>> {
    let trials = trials.max(10_000);
    let mut out = Vec::new();
    for (j, &c) in GAUSSMIN_C.iter().enumerate() {
        for &n in &GAUSSMIN_N {
            let mut rng = cell_rng(seed, Suite::Gaussmin, n as usize, j as u64);
            out.push(min_gaussian_mc(n, c, trials, &mut rng)?);
        }
    }
    Ok(out)
}

/// The geometric-sum tail at the deviations used for RLS (p = 1/2 and the
/// variance-5 geometric) and for the EA at n = 1000.
fn tails(trials: u64, seed: u64) -> Result<Vec<BoundReport>> {
    let p5 = geometric_p_for_variance(5.0)?;
    let p_ea = 1.0 / (2.0 * 1000f64.ln());
    let mut out = Vec::new();
    let mut cell = 0;
    for &t in &[10u64, 100, 1000] {
        for (p, delta) in [
            (0.5, rls_delta(t, 0.5)),
            (p5, rls_delta(t, p5)),
            (p_ea, ea_delta(t, p_ea, 1000)),
        ] {
            let mut rng = cell_rng(seed, Suite::Tails, t as usize, cell);
            out.push(geometric_sum_mc(t, p, delta, trials, &mut rng)?);
            cell += 1;
        }
    }
    Ok(out)
}

/// RLS on Geo(1/2) and the EA on Geo(1/(2 ln n)), both at n = 1000.
fn stagnation(runs: u64, seed: u64) -> Result<Vec<BoundReport>> {
    let n = 1000;
    let rls = StagnationSpec::new(Algorithm::Rls, n, NoiseModel::geometric(0.5)?, runs, seed);
    let ea_p = 1.0 / (2.0 * (n as f64).ln());
    let ea = StagnationSpec::new(Algorithm::Ea, n, NoiseModel::geometric(ea_p)?, runs, seed);
    let mut out = Vec::new();
    out.extend(stagnation_experiment(&rls)?);
    out.extend(stagnation_experiment(&ea)?);
    Ok(out)
}

fn rs_ceiling(runs: u64, seed: u64) -> Result<Vec<BoundReport>> {
    Ok(vec![rs_ceiling_experiment(&RsCeilingSpec::new(
        1000, 1_000_000, runs, seed,
    ))?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rugged_onemax::oracles::Verdict;

    #[test]
    fn names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        let err = "lemma2".parse::<Suite>().unwrap_err();
        assert!(err.contains("rs-ceiling") && err.contains("all"), "{err}");
    }

    #[test]
    fn small_lemma1_run() {
        let reports = run_suite(Suite::Lemma1, Some(200), 1).unwrap();
        assert_eq!(reports.len(), 12);
        assert!(
            reports.iter().all(|r| r.verdict == Verdict::Pass),
            "{reports:?}"
        );
    }

    #[test]
    fn small_tails_run() {
        let reports = run_suite(Suite::Tails, Some(500), 1).unwrap();
        assert_eq!(reports.len(), 9);
        assert!(
            reports.iter().all(|r| r.verdict == Verdict::Pass),
            "{reports:?}"
        );
    }

    #[test]
    fn zero_trials_is_config_error() {
        assert!(matches!(
            run_suite(Suite::Tails, Some(0), 1),
            Err(Error::Config(_))
        ));
    }
}
