//! How long the cGA takes to first sample a point with `n(1 - eps)` ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::NoiseSpec;
use super::expr::Expr;
use crate::error::{Error, Result};
use crate::landscape::FrozenLandscape;
use crate::optimizers::{run, Algorithm, RunOptions};
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct HittingSpec {
    pub n_values: Vec<usize>,
    pub noise: NoiseSpec,
    pub k_rule: Expr,
    pub epsilon: f64,
    pub reps: u64,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingRow {
    pub n: usize,
    pub k: f64,
    pub target_ones: usize,
    /// Mean over repetitions; censored runs count as the cap `10 n^2`, so
    /// with censoring this is a lower bound on the true mean.
    pub mean_iterations: f64,
    pub censored: u64,
    pub reps: u64,
    /// `mean_iterations / (K sqrt(n) sigma^2)`; absent without noise.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingReport {
    pub rows: Vec<HittingRow>,
    /// Least-squares slope of `ln mean_iterations` against `ln n`.
    pub log_log_slope: Option<f64>,
    /// Largest ratio over smallest ratio.
    pub ratio_spread: Option<f64>,
}

impl HittingReport {
    pub fn any_censored(&self) -> bool {
        self.rows.iter().any(|r| r.censored > 0)
    }
}

/// One cell per (n, rep); every run stops at the target or at `10 n^2` iterations.
pub fn cga_hitting_time_sweep(spec: &HittingSpec) -> Result<HittingReport> {
    if !(spec.epsilon > 0.0 && spec.epsilon < 1.0) {
        return Err(Error::config(format!(
            "epsilon must lie in (0, 1), got {}",
            spec.epsilon
        )));
    }
    if spec.n_values.is_empty() || spec.reps == 0 {
        return Err(Error::config("need at least one n and one repetition"));
    }
    if let Some(n) = spec.n_values.iter().find(|&&n| n < 2) {
        return Err(Error::config(format!("n must be >= 2, got {n}")));
    }
    let noise = spec.noise.model()?;
    let sigma2 = noise.variance();
    let mut rows = Vec::with_capacity(spec.n_values.len());
    for &n in &spec.n_values {
        let k = spec.k_rule.eval(n)?;
        if k <= 0.0 {
            return Err(Error::config(format!(
                "K rule `{}` gives {k} at n={n}",
                spec.k_rule
            )));
        }
        let cap = 10 * (n as u64).pow(2);
        let target = (n as f64 * (1.0 - spec.epsilon)).ceil() as usize;
        let hits = (0..spec.reps)
            .into_par_iter()
            .map(|rep| {
                let id = Algorithm::Cga.id();
                let landscape = FrozenLandscape::new(
                    n,
                    noise,
                    derive_seed(spec.master_seed, "landscape", id, n as u64, rep),
                )?;
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                    spec.master_seed,
                    "run",
                    id,
                    n as u64,
                    rep,
                ));
                let mut opts = RunOptions::new(cap).with_k(k);
                opts.ones_threshold = Some(target);
                opts.stop_at_threshold = true;
                Ok(run(Algorithm::Cga, &landscape, &opts, &mut rng)?.threshold_hit)
            })
            .collect::<Result<Vec<Option<u64>>>>()?;
        let censored = hits.iter().filter(|h| h.is_none()).count() as u64;
        let total: u64 = hits.iter().map(|h| h.unwrap_or(cap)).sum();
        let mean = total as f64 / spec.reps as f64;
        let scale = k * (n as f64).sqrt() * sigma2;
        rows.push(HittingRow {
            n,
            k,
            target_ones: target,
            mean_iterations: mean,
            censored,
            reps: spec.reps,
            ratio: (sigma2 > 0.0).then(|| mean / scale),
        });
    }
    let log_log_slope = slope(&rows);
    let ratios: Option<Vec<f64>> = rows.iter().map(|r| r.ratio).collect();
    let ratio_spread = ratios.filter(|r| r.len() > 1).map(|r| {
        let max = r.iter().copied().fold(f64::MIN, f64::max);
        let min = r.iter().copied().fold(f64::MAX, f64::min);
        max / min
    });
    Ok(HittingReport {
        rows,
        log_log_slope,
        ratio_spread,
    })
}

fn slope(rows: &[HittingRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.mean_iterations > 0.0)
        .map(|r| ((r.n as f64).ln(), r.mean_iterations.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
