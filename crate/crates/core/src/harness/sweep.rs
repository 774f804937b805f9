//! Running every (algorithm, n, repetition) cell of a config.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, NoiseKind, NoiseSpec};
use super::records::RunRecord;
use crate::error::Result;
use crate::landscape::FrozenLandscape;
use crate::optimizers::{run, Algorithm, RunOptions};
use crate::seed::derive_seed;

/// Runs all cells, in parallel, and returns the records sorted by
/// (algorithm, n, rep). The config is validated before any run starts.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let noise = config.noise.model()?;
    let mut cells = Vec::new();
    for &algorithm in &config.algorithms {
        for &n in &config.n_values {
            let budget = config.budget_rule.eval_count(n)?;
            let k = if algorithm == Algorithm::Cga {
                Some(config.k_at(n)?)
            } else {
                None
            };
            for rep in 0..config.repetitions {
                cells.push((algorithm, n, rep, budget, k));
            }
        }
    }
    let mut records = cells
        .into_par_iter()
        .map(|(algorithm, n, rep, budget, k)| {
            let landscape_seed = derive_seed(
                config.master_seed,
                "landscape",
                algorithm.id(),
                n as u64,
                rep,
            );
            let run_seed = derive_seed(config.master_seed, "run", algorithm.id(), n as u64, rep);
            let landscape = FrozenLandscape::new(n, noise, landscape_seed)?;
            let mut options = RunOptions::new(budget);
            options.k = k;
            options.start = config.start;
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
            let started = Instant::now();
            let tel = run(algorithm, &landscape, &options, &mut rng)?;
            let wall_ms = if config.record_wall_time {
                started.elapsed().as_millis() as u64
            } else {
                0
            };
            Ok(RunRecord {
                algorithm,
                n,
                rep,
                run_seed,
                landscape_seed,
                budget,
                iterations: tel.iterations,
                transitions: tel.accepted_transitions,
                max_ones: tel.max_ones_sampled,
                final_ones: tel.final_ones,
                wall_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(RunRecord::key);
    Ok(records)
}

/// The two reference sweeps: all four algorithms, `n = 100, 200, ..., n_max`,
/// budget `n^2`, variance 5, normal then geometric noise. Each noise model
/// gets its own master seed derived from `master_seed`.
pub fn figure1_preset(repetitions: u64, n_max: usize, master_seed: u64) -> Vec<ExperimentConfig> {
    let n_values: Vec<usize> = (100..=n_max).step_by(100).collect();
    [NoiseKind::Normal, NoiseKind::Geometric]
        .into_iter()
        .map(|kind| {
            let seed = derive_seed(master_seed, kind.name(), 0, 0, 0);
            ExperimentConfig::new(
                n_values.clone(),
                repetitions,
                NoiseSpec::new(kind, 5.0),
                seed,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Expr;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(
            vec![10, 20, 30],
            5,
            NoiseSpec::new(NoiseKind::Normal, 5.0),
            77,
        );
        cfg.algorithms = vec![Algorithm::Ea, Algorithm::Rls];
        cfg
    }

    #[test]
    fn cardinality_and_order() {
        let recs = run_sweep(&small()).unwrap();
        assert_eq!(recs.len(), 30);
        assert!(recs.windows(2).all(|w| w[0].key() < w[1].key()));
        assert_eq!(recs[0].algorithm, Algorithm::Rls);
        assert!(recs
            .iter()
            .all(|r| r.budget == (r.n * r.n) as u64 && r.wall_ms == 0));
    }

    #[test]
    fn deterministic() {
        assert_eq!(run_sweep(&small()).unwrap(), run_sweep(&small()).unwrap());
    }

    #[test]
    fn seeds_differ_per_cell() {
        let recs = run_sweep(&small()).unwrap();
        let mut seeds: Vec<u64> = recs
            .iter()
            .flat_map(|r| [r.run_seed, r.landscape_seed])
            .collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 2 * recs.len());
    }

    #[test]
    fn invalid_config_fails_up_front() {
        let mut cfg = small();
        cfg.budget_rule = Expr::parse("n - 20").unwrap();
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn preset_shape() {
        let cfgs = figure1_preset(100, 1000, 1);
        assert_eq!(cfgs.len(), 2);
        let cells: u64 = cfgs
            .iter()
            .map(|c| c.algorithms.len() as u64 * c.n_values.len() as u64 * c.repetitions)
            .sum();
        assert_eq!(cells, 8000);
        assert_ne!(cfgs[0].master_seed, cfgs[1].master_seed);
        assert_eq!(cfgs[1].noise.kind, NoiseKind::Geometric);
        assert_eq!(figure1_preset(30, 300, 1)[0].n_values, vec![100, 200, 300]);
    }
}
