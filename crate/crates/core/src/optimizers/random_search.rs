//! Random search: a fresh uniform string every iteration.

use rand::Rng;

use super::{Optimizer, StepReport, Transition};
use crate::landscape::{BitString, FrozenLandscape};

/// Best-so-far tracker for random search.
#[derive(Clone, Debug)]
pub struct RandomSearch {
    n: usize,
    best_fitness: f64,
    best_ones: usize,
    best_noise: f64,
}

impl RandomSearch {
    pub fn new(n: usize) -> Self {
        RandomSearch {
            n,
            best_fitness: f64::NEG_INFINITY,
            best_ones: 0,
            best_noise: f64::NAN,
        }
    }

    pub fn best_fitness(&self) -> f64 {
        self.best_fitness
    }

    pub fn rs_step<R: Rng + ?Sized>(
        &mut self,
        landscape: &FrozenLandscape,
        rng: &mut R,
    ) -> StepReport {
        let x = BitString::random(self.n, rng);
        let fitness = landscape.evaluate(&x);
        let ones = x.count_ones();
        let transition = if fitness > self.best_fitness {
            self.best_fitness = fitness;
            self.best_ones = ones;
            self.best_noise = fitness - ones as f64;
            Some(Transition {
                ones,
                noise: self.best_noise,
            })
        } else {
            None
        };
        StepReport {
            candidate_ones: ones,
            accepted: transition.is_some(),
            transition,
            evaluations: 1,
        }
    }
}

impl Optimizer for RandomSearch {
    fn step<R: Rng + ?Sized>(&mut self, landscape: &FrozenLandscape, rng: &mut R) -> StepReport {
        self.rs_step(landscape, rng)
    }

    /// Popcount of the best-fitness point found.
    fn current_ones(&self) -> usize {
        self.best_ones
    }

    fn current_noise(&self) -> f64 {
        self.best_noise
    }
}
