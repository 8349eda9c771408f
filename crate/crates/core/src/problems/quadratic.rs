use rand::RngCore;

use super::{uniform, LossMetadata, Problem, ScalarProblem, SearchSpace};
use crate::error::{invalid_param, Result};
use crate::objective::PiecewiseQuadratic;
use crate::sum;

/// Squared loss `f(h, z) = (h − z)²` on `ℋ = 𝒵 = [−r, r]`: the canonical
/// strongly convex instance (ν = 2, L = 4r, B = 4r²).
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic1d {
    radius: f64,
}

impl Quadratic1d {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid_param("radius", format!("must be positive and finite, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Default for Quadratic1d {
    fn default() -> Self {
        Self { radius: 1.0 }
    }
}

impl Problem for Quadratic1d {
    type Hypothesis = f64;
    type Point = f64;

    fn name(&self) -> &'static str {
        "quadratic_1d"
    }

    fn loss(&self, h: &f64, z: &f64) -> f64 {
        (h - z) * (h - z)
    }

    fn metadata(&self) -> LossMetadata {
        let r = self.radius;
        LossMetadata {
            regret_bound: 4.0 * r * r,
            lipschitz: Some(4.0 * r),
            strong_convexity: Some(2.0),
            diameter: Some(2.0 * r),
            dimension: 1,
        }
    }

    fn default_hypothesis(&self) -> f64 {
        -self.radius
    }

    fn contains_point(&self, z: &f64) -> bool {
        z.abs() <= self.radius
    }

    fn contains_hypothesis(&self, h: &f64) -> bool {
        h.abs() <= self.radius
    }

    /// Clipped mean.
    fn exact_erm(&self, points: &[f64]) -> Option<f64> {
        if points.is_empty() {
            return Some(self.default_hypothesis());
        }
        let mean = sum::sum(points.iter().copied()) / points.len() as f64;
        Some(mean.clamp(-self.radius, self.radius))
    }

    fn search_space(&self) -> SearchSpace<f64> {
        SearchSpace::Interval {
            lo: -self.radius,
            hi: self.radius,
            embed: |x| x,
        }
    }

    fn gradient(&self, h: &f64, z: &f64) -> Result<f64> {
        Ok(2.0 * (h - z))
    }

    fn sample_hypothesis(&self, rng: &mut dyn RngCore) -> f64 {
        uniform(rng, -self.radius, self.radius)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> f64 {
        uniform(rng, -self.radius, self.radius)
    }
}

impl ScalarProblem for Quadratic1d {
    fn interval(&self) -> (f64, f64) {
        (-self.radius, self.radius)
    }

    fn add_loss_terms(&self, z: &f64, objective: &mut PiecewiseQuadratic) -> bool {
        objective.add_squared_distance(*z, 1.0);
        true
    }

    fn is_convex(&self) -> bool {
        true
    }
}
