//! Data sources for online runs: fixed sequences, i.i.d. samplers and
//! adaptive adversaries that see the learner's current play.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::learners::Play;
use crate::problems::{FiniteExperts, Problem};

/// Chooses `z_t` after seeing the history and the learner's round-`t` play.
pub trait Adversary<P: Problem> {
    fn name(&self) -> String;

    /// `round` is 1-based; `history` holds `z_1, …, z_{round−1}`.
    fn next_point(&mut self, problem: &P, round: usize, history: &[P::Point], play: &Play<P::Hypothesis>) -> Result<P::Point>;
}

impl<P: Problem, A: Adversary<P> + ?Sized> Adversary<P> for Box<A> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn next_point(&mut self, problem: &P, round: usize, history: &[P::Point], play: &Play<P::Hypothesis>) -> Result<P::Point> {
        (**self).next_point(problem, round, history, play)
    }
}

/// Replays a fixed sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedSequence<Z> {
    points: Vec<Z>,
}

impl<Z> FixedSequence<Z> {
    pub fn new(points: Vec<Z>) -> Self {
        Self { points }
    }
}

impl<P: Problem> Adversary<P> for FixedSequence<P::Point> {
    fn name(&self) -> String {
        "fixed".into()
    }

    fn next_point(&mut self, _problem: &P, round: usize, _history: &[P::Point], _play: &Play<P::Hypothesis>) -> Result<P::Point> {
        self.points.get(round - 1).cloned().ok_or(Error::LengthMismatch {
            expected: round,
            actual: self.points.len(),
        })
    }
}

/// Draws each point independently from the problem's sampler.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl<P: Problem> Adversary<P> for RandomSource {
    fn name(&self) -> String {
        "random".into()
    }

    fn next_point(&mut self, problem: &P, _round: usize, _history: &[P::Point], _play: &Play<P::Hypothesis>) -> Result<P::Point> {
        Ok(problem.sample_point(&mut self.rng))
    }
}

/// Charges the full loss `B` to the expert the learner currently trusts most
/// (lowest index on ties) and 0 to the rest.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyExpertAdversary;

impl Adversary<FiniteExperts> for GreedyExpertAdversary {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn next_point(&mut self, problem: &FiniteExperts, _round: usize, _history: &[Vec<f64>], play: &Play<usize>) -> Result<Vec<f64>> {
        let d = problem.experts();
        let target = match play {
            Play::Pure(h) => *h,
            Play::Mixed(m) => {
                let mut mass = vec![0.0; d];
                for (&h, &w) in m.experts.iter().zip(m.weights.weights()) {
                    if h < d {
                        mass[h] += w;
                    }
                }
                let mut best = 0;
                for (i, &w) in mass.iter().enumerate() {
                    if w > mass[best] {
                        best = i;
                    }
                }
                best
            }
        };
        let mut z = vec![0.0; d];
        if target < d {
            z[target] = problem.bound();
        }
        Ok(z)
    }
}
