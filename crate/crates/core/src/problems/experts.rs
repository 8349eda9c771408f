use rand::{Rng, RngCore};

use super::{FiniteTracker, HindsightTracker, LossMetadata, Problem, SearchSpace};
use crate::error::{invalid_param, Error, Result};

/// Prediction with `d` experts: a point is the vector of per-expert losses in
/// `[0, B]` and the hypothesis is an expert index.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteExperts {
    d: usize,
    bound: f64,
}

impl FiniteExperts {
    pub fn new(d: usize, bound: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyExpertSet);
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(invalid_param("B", format!("must be positive and finite, got {bound}")));
        }
        Ok(Self { d, bound })
    }

    pub fn experts(&self) -> usize {
        self.d
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

impl Problem for FiniteExperts {
    type Hypothesis = usize;
    type Point = Vec<f64>;

    fn name(&self) -> &'static str {
        "finite_experts"
    }

    fn loss(&self, h: &usize, z: &Vec<f64>) -> f64 {
        z[*h]
    }

    fn metadata(&self) -> LossMetadata {
        LossMetadata {
            regret_bound: self.bound,
            lipschitz: None,
            strong_convexity: None,
            diameter: None,
            dimension: 0,
        }
    }

    fn default_hypothesis(&self) -> usize {
        0
    }

    fn contains_point(&self, z: &Vec<f64>) -> bool {
        z.len() == self.d && z.iter().all(|&v| (0.0..=self.bound).contains(&v))
    }

    fn contains_hypothesis(&self, h: &usize) -> bool {
        *h < self.d
    }

    /// Lowest-index expert with minimal cumulative loss.
    fn exact_erm(&self, points: &[Vec<f64>]) -> Option<usize> {
        let mut tracker = FiniteTracker::new(self, (0..self.d).collect());
        for z in points {
            tracker.push(z);
        }
        tracker.best().ok().map(|(h, _)| h)
    }

    fn search_space(&self) -> SearchSpace<usize> {
        SearchSpace::Finite((0..self.d).collect())
    }

    fn sample_hypothesis(&self, rng: &mut dyn RngCore) -> usize {
        rng.random_range(0..self.d)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.d).map(|_| rng.random_range(0.0..=self.bound)).collect()
    }

    fn hindsight_tracker(&self) -> Box<dyn HindsightTracker<Self> + '_> {
        Box::new(FiniteTracker::new(self, (0..self.d).collect()))
    }
}
