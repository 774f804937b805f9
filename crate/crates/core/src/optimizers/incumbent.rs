//! Single-incumbent searchers: RLS and the (1+1) EA.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{Optimizer, StepReport, Transition};
use crate::error::{Error, Result};
use crate::landscape::{BitString, FrozenLandscape};

/// Uniformly random string with exactly `floor(n/2)` ones.
pub fn init_balanced_start<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BitString> {
    if n < 2 {
        return Err(Error::config(format!("n must be >= 2, got {n}")));
    }
    let mut x = BitString::zeros(n);
    for i in index::sample(rng, n, n / 2) {
        x.flip(i);
    }
    Ok(x)
}

/// The current point of RLS / (1+1) EA together with its frozen fitness.
///
/// Also remembers which single-bit flips were already rejected for the
/// current point. Fitness is frozen, so re-proposing such a flip is rejected
/// again; the memo answers it without hashing. It is cleared on every move.
#[derive(Clone, Debug)]
pub struct IncumbentState {
    current: BitString,
    current_fitness: f64,
    rejected: Vec<u64>,
}

impl IncumbentState {
    pub fn new(start: BitString, landscape: &FrozenLandscape) -> Self {
        assert_eq!(start.len(), landscape.n(), "start point has wrong length");
        let current_fitness = landscape.evaluate(&start);
        let rejected = vec![0; start.words().len()];
        IncumbentState {
            current: start,
            current_fitness,
            rejected,
        }
    }

    pub fn current(&self) -> &BitString {
        &self.current
    }

    pub fn current_fitness(&self) -> f64 {
        self.current_fitness
    }

    pub fn current_noise(&self) -> f64 {
        self.current_fitness - self.current.count_ones() as f64
    }

    fn is_rejected(&self, i: usize) -> bool {
        self.rejected[i / 64] >> (i % 64) & 1 == 1
    }

    fn accept(&mut self, fitness: f64) -> StepReport {
        self.current_fitness = fitness;
        self.rejected.iter_mut().for_each(|w| *w = 0);
        StepReport {
            candidate_ones: self.current.count_ones(),
            accepted: true,
            transition: Some(Transition {
                ones: self.current.count_ones(),
                noise: self.current_noise(),
            }),
            evaluations: 1,
        }
    }

    /// RLS with the flipped position fixed to `i`.
    pub fn rls_step_at(&mut self, landscape: &FrozenLandscape, i: usize) -> StepReport {
        let candidate_ones = if self.current.get(i) {
            self.current.count_ones() - 1
        } else {
            self.current.count_ones() + 1
        };
        if self.is_rejected(i) {
            return StepReport::rejected(candidate_ones, 1);
        }
        self.current.flip(i);
        let fitness = landscape.evaluate(&self.current);
        if fitness >= self.current_fitness {
            self.accept(fitness)
        } else {
            self.current.flip(i);
            self.rejected[i / 64] |= 1 << (i % 64);
            StepReport::rejected(candidate_ones, 1)
        }
    }

    /// Flip one uniformly chosen bit; keep the result if it is not worse.
    pub fn rls_step<R: Rng + ?Sized>(
        &mut self,
        landscape: &FrozenLandscape,
        rng: &mut R,
    ) -> StepReport {
        let i = rng.random_range(0..self.current.len());
        self.rls_step_at(landscape, i)
    }

    /// (1+1) EA candidate made by flipping the given distinct positions.
    pub fn flip_positions(
        &mut self,
        landscape: &FrozenLandscape,
        positions: &[usize],
    ) -> StepReport {
        match positions {
            // y = x: accepted by `f(y) >= f(x)`, nothing moves
            [] => StepReport {
                candidate_ones: self.current.count_ones(),
                accepted: true,
                transition: None,
                evaluations: 1,
            },
            [i] => self.rls_step_at(landscape, *i),
            _ => {
                for &i in positions {
                    self.current.flip(i);
                }
                let candidate_ones = self.current.count_ones();
                let fitness = landscape.evaluate(&self.current);
                if fitness >= self.current_fitness {
                    self.accept(fitness)
                } else {
                    for &i in positions {
                        self.current.flip(i);
                    }
                    StepReport::rejected(candidate_ones, 1)
                }
            }
        }
    }
}

/// Random local search.
#[derive(Clone, Debug)]
pub struct Rls {
    pub state: IncumbentState,
}

impl Optimizer for Rls {
    fn step<R: Rng + ?Sized>(&mut self, landscape: &FrozenLandscape, rng: &mut R) -> StepReport {
        self.state.rls_step(landscape, rng)
    }

    fn current_ones(&self) -> usize {
        self.state.current.count_ones()
    }

    fn current_noise(&self) -> f64 {
        self.state.current_noise()
    }
}

/// The (1+1) EA with standard bit mutation at rate `1/n`.
///
/// Draws the number of flipped bits from `Binomial(n, 1/n)` and then that
/// many distinct positions uniformly, which has the same law as flipping
/// every bit independently.
#[derive(Clone, Debug)]
pub struct OnePlusOneEa {
    pub state: IncumbentState,
    flip_count: Binomial,
}

impl OnePlusOneEa {
    pub fn new(state: IncumbentState) -> Self {
        let flip_count = ea_flip_count_distribution(state.current.len());
        OnePlusOneEa { state, flip_count }
    }

    pub fn sample_positions<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let n = self.state.current.len();
        let k = self.flip_count.sample(rng) as usize;
        match k {
            0 => Vec::new(),
            1 => vec![rng.random_range(0..n)],
            _ => index::sample(rng, n, k).into_vec(),
        }
    }

    pub fn ea_step<R: Rng + ?Sized>(
        &mut self,
        landscape: &FrozenLandscape,
        rng: &mut R,
    ) -> StepReport {
        let positions = self.sample_positions(rng);
        self.state.flip_positions(landscape, &positions)
    }
}

pub(crate) fn ea_flip_count_distribution(n: usize) -> Binomial {
    Binomial::new(n as u64, 1.0 / n as f64).expect("1/n is a probability")
}

impl Optimizer for OnePlusOneEa {
    fn step<R: Rng + ?Sized>(&mut self, landscape: &FrozenLandscape, rng: &mut R) -> StepReport {
        self.ea_step(landscape, rng)
    }

    fn current_ones(&self) -> usize {
        self.state.current.count_ones()
    }

    fn current_noise(&self) -> f64 {
        self.state.current_noise()
    }
}
