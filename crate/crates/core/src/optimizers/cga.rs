//! The compact genetic algorithm.

use rand::Rng;

use super::{Optimizer, StepReport, Transition};
use crate::error::{Error, Result};
use crate::landscape::{BitString, FrozenLandscape};

// Float sums of +-1/K can miss a border by an ulp or so; values this close
// are treated as exactly on it.
const BORDER_SNAP: f64 = 1e-12;

/// Marginal vector of the cGA.
///
/// Marginals start at 1/2 and move by exactly `1/K` toward the fitter of two
/// samples, clamped to `[0, 1]` with no inner borders.
#[derive(Clone, Debug)]
pub struct CgaState {
    marginals: Vec<f64>,
    k: f64,
    t: u64,
    unabsorbed: usize,
    lowest_seen: f64,
    best_fitness: f64,
    best_ones: usize,
    last_winner_ones: usize,
}

fn is_absorbed(p: f64) -> bool {
    p == 0.0 || p == 1.0
}

impl CgaState {
    pub fn new(n: usize, k: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("cGA needs n >= 1"));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::config(format!("cGA needs K > 0, got {k}")));
        }
        Ok(CgaState {
            marginals: vec![0.5; n],
            k,
            t: 0,
            unabsorbed: n,
            lowest_seen: 0.5,
            best_fitness: f64::NEG_INFINITY,
            best_ones: 0,
            last_winner_ones: 0,
        })
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Sum of all marginals.
    pub fn marginal_sum(&self) -> f64 {
        self.marginals.iter().sum()
    }

    pub fn min_marginal(&self) -> f64 {
        self.marginals.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Smallest value any marginal has taken so far.
    pub fn lowest_marginal_seen(&self) -> f64 {
        self.lowest_seen
    }

    /// Every marginal sits at 0 or 1; sampling is deterministic from here on.
    pub fn is_absorbed(&self) -> bool {
        self.unabsorbed == 0
    }

    /// Moves marginals toward `winner` wherever it disagrees with `loser`.
    pub fn update(&mut self, winner: &BitString, loser: &BitString) {
        let step = 1.0 / self.k;
        for (w, (&xw, &yw)) in winner.words().iter().zip(loser.words()).enumerate() {
            let mut diff = xw ^ yw;
            while diff != 0 {
                let bit = diff.trailing_zeros() as usize;
                diff &= diff - 1;
                let i = w * 64 + bit;
                let before = self.marginals[i];
                let mut p = if xw >> bit & 1 == 1 {
                    before + step
                } else {
                    before - step
                };
                p = p.clamp(0.0, 1.0);
                if p < BORDER_SNAP {
                    p = 0.0;
                } else if p > 1.0 - BORDER_SNAP {
                    p = 1.0;
                }
                match (is_absorbed(before), is_absorbed(p)) {
                    (false, true) => self.unabsorbed -= 1,
                    (true, false) => self.unabsorbed += 1,
                    _ => {}
                }
                self.lowest_seen = self.lowest_seen.min(p);
                self.marginals[i] = p;
            }
        }
    }

    /// One generation: two samples, two frozen evaluations, one update.
    pub fn cga_step<R: Rng + ?Sized>(
        &mut self,
        landscape: &FrozenLandscape,
        rng: &mut R,
    ) -> StepReport {
        let x = BitString::sample_from_marginals(&self.marginals, rng);
        let y = BitString::sample_from_marginals(&self.marginals, rng);
        let fx = landscape.evaluate(&x);
        let fy = landscape.evaluate(&y);
        self.step_with_samples(x, fx, y, fy)
    }

    /// Update from two already evaluated samples. Ties keep `x` as winner.
    pub fn step_with_samples(
        &mut self,
        x: BitString,
        fx: f64,
        y: BitString,
        fy: f64,
    ) -> StepReport {
        let candidate_ones = x.count_ones().max(y.count_ones());
        // new best-so-far among the two samples, x first
        let mut transition = None;
        for (point, f) in [(&x, fx), (&y, fy)] {
            if f > self.best_fitness {
                self.best_fitness = f;
                self.best_ones = point.count_ones();
                transition = Some(Transition {
                    ones: point.count_ones(),
                    noise: f - point.count_ones() as f64,
                });
            }
        }
        let (winner, loser) = if fx < fy { (&y, &x) } else { (&x, &y) };
        self.update(winner, loser);
        self.last_winner_ones = winner.count_ones();
        self.t += 1;
        StepReport {
            candidate_ones,
            accepted: transition.is_some(),
            transition,
            evaluations: 2,
        }
    }
}

/// The cGA driven through [`Optimizer`].
#[derive(Clone, Debug)]
pub struct Cga {
    pub state: CgaState,
}

impl Optimizer for Cga {
    fn step<R: Rng + ?Sized>(&mut self, landscape: &FrozenLandscape, rng: &mut R) -> StepReport {
        self.state.cga_step(landscape, rng)
    }

    /// Popcount of the last iteration's winner.
    fn current_ones(&self) -> usize {
        self.state.last_winner_ones
    }

    fn current_noise(&self) -> f64 {
        f64::NAN
    }

    fn is_finished(&self) -> bool {
        self.state.is_absorbed()
    }

    fn marginal_floor(&self) -> Option<f64> {
        Some(self.state.lowest_seen)
    }

    fn current_min_marginal(&self) -> Option<f64> {
        Some(self.state.min_marginal())
    }
}
