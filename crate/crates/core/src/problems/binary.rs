use rand::{Rng, RngCore};

use super::{FiniteTracker, HindsightTracker, LossMetadata, Problem, ScalarProblem, SearchSpace};
use crate::error::Result;
use crate::objective::PiecewiseQuadratic;

fn ones(points: &[u8]) -> usize {
    points.iter().filter(|&&z| z == 1).count()
}

/// Majority bit with ties broken toward 0.
fn majority(ones: usize, len: usize) -> u8 {
    u8::from(2 * ones > len)
}

/// The discrete game `ℋ = 𝒵 = {0, 1}`, `f(h, z) = |h − z|`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BinaryGame;

impl Problem for BinaryGame {
    type Hypothesis = u8;
    type Point = u8;

    fn name(&self) -> &'static str {
        "binary_game"
    }

    fn loss(&self, h: &u8, z: &u8) -> f64 {
        f64::from(h.abs_diff(*z))
    }

    fn metadata(&self) -> LossMetadata {
        LossMetadata {
            regret_bound: 1.0,
            lipschitz: None,
            strong_convexity: None,
            diameter: Some(1.0),
            dimension: 0,
        }
    }

    fn default_hypothesis(&self) -> u8 {
        0
    }

    fn contains_point(&self, z: &u8) -> bool {
        *z <= 1
    }

    fn contains_hypothesis(&self, h: &u8) -> bool {
        *h <= 1
    }

    fn exact_erm(&self, points: &[u8]) -> Option<u8> {
        Some(majority(ones(points), points.len()))
    }

    fn exact_erm_leave_one_out(&self, points: &[u8]) -> Option<Vec<u8>> {
        let k = ones(points);
        let m = points.len();
        Some(
            points
                .iter()
                .map(|&z| majority(k - usize::from(z), m - 1))
                .collect(),
        )
    }

    fn search_space(&self) -> SearchSpace<u8> {
        SearchSpace::Finite(vec![0, 1])
    }

    fn sample_hypothesis(&self, rng: &mut dyn RngCore) -> u8 {
        u8::from(rng.random::<bool>())
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> u8 {
        u8::from(rng.random::<bool>())
    }

    fn hindsight_tracker(&self) -> Box<dyn HindsightTracker<Self> + '_> {
        Box::new(FiniteTracker::new(self, vec![0, 1]))
    }
}

/// The convexified binary game: play `p = P(h = 1)` and suffer the expected
/// loss `(1 − p)z + p(1 − z)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RandomizedBinary;

impl Problem for RandomizedBinary {
    type Hypothesis = f64;
    type Point = u8;

    fn name(&self) -> &'static str {
        "randomized_binary"
    }

    fn loss(&self, p: &f64, z: &u8) -> f64 {
        let z = f64::from(*z);
        (1.0 - p) * z + p * (1.0 - z)
    }

    fn metadata(&self) -> LossMetadata {
        LossMetadata {
            regret_bound: 1.0,
            lipschitz: Some(1.0),
            strong_convexity: None,
            diameter: Some(1.0),
            dimension: 1,
        }
    }

    fn default_hypothesis(&self) -> f64 {
        0.0
    }

    fn contains_point(&self, z: &u8) -> bool {
        *z <= 1
    }

    fn contains_hypothesis(&self, p: &f64) -> bool {
        (0.0..=1.0).contains(p)
    }

    /// The loss is linear in `p`, so the minimizer is a vertex: the majority
    /// bit, 0 on ties.
    fn exact_erm(&self, points: &[u8]) -> Option<f64> {
        Some(f64::from(majority(ones(points), points.len())))
    }

    fn exact_erm_leave_one_out(&self, points: &[u8]) -> Option<Vec<f64>> {
        let k = ones(points);
        let m = points.len();
        Some(
            points
                .iter()
                .map(|&z| f64::from(majority(k - usize::from(z), m - 1)))
                .collect(),
        )
    }

    fn search_space(&self) -> SearchSpace<f64> {
        SearchSpace::Interval {
            lo: 0.0,
            hi: 1.0,
            embed: |x| x,
        }
    }

    fn gradient(&self, _p: &f64, z: &u8) -> Result<f64> {
        Ok(1.0 - 2.0 * f64::from(*z))
    }

    fn sample_hypothesis(&self, rng: &mut dyn RngCore) -> f64 {
        rng.random::<f64>()
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> u8 {
        u8::from(rng.random::<bool>())
    }

    fn hindsight_tracker(&self) -> Box<dyn HindsightTracker<Self> + '_> {
        Box::new(FiniteTracker::new(self, vec![0.0, 1.0]))
    }
}

impl ScalarProblem for RandomizedBinary {
    fn interval(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn add_loss_terms(&self, z: &u8, objective: &mut PiecewiseQuadratic) -> bool {
        let z = f64::from(*z);
        objective.add_constant(z);
        objective.add_linear(1.0 - 2.0 * z);
        true
    }

    fn is_convex(&self) -> bool {
        true
    }
}
