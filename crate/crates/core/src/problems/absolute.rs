use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::RngCore;

use super::{total_loss, uniform, HindsightTracker, LossMetadata, Problem, ScalarProblem, SearchSpace};
use crate::error::{invalid_param, Result};
use crate::objective::PiecewiseQuadratic;
use crate::sum::CompensatedSum;

/// Absolute loss `f(h, z) = |h − z|` with `h ∈ [−k, k]` and `z ∈ ℝ`.
/// Convex but not strongly convex; instantaneous regret bounded by `2k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Absolute1d {
    k: f64,
}

impl Absolute1d {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid_param("k", format!("must be positive and finite, got {k}")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Lower median of a non-empty slice.
fn lower_median(points: &[f64]) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[(sorted.len() - 1) / 2]
}

impl Problem for Absolute1d {
    type Hypothesis = f64;
    type Point = f64;

    fn name(&self) -> &'static str {
        "absolute_1d"
    }

    fn loss(&self, h: &f64, z: &f64) -> f64 {
        (h - z).abs()
    }

    fn metadata(&self) -> LossMetadata {
        LossMetadata {
            regret_bound: 2.0 * self.k,
            lipschitz: Some(1.0),
            strong_convexity: None,
            diameter: Some(2.0 * self.k),
            dimension: 1,
        }
    }

    fn default_hypothesis(&self) -> f64 {
        -self.k
    }

    fn contains_point(&self, z: &f64) -> bool {
        z.is_finite()
    }

    fn contains_hypothesis(&self, h: &f64) -> bool {
        h.abs() <= self.k
    }

    /// Lower median, clipped to `[−k, k]`.
    fn exact_erm(&self, points: &[f64]) -> Option<f64> {
        if points.is_empty() {
            return Some(self.default_hypothesis());
        }
        Some(lower_median(points).clamp(-self.k, self.k))
    }

    fn search_space(&self) -> SearchSpace<f64> {
        SearchSpace::Interval {
            lo: -self.k,
            hi: self.k,
            embed: |x| x,
        }
    }

    /// `sign(h − z)`, with 0 chosen at the kink.
    fn gradient(&self, h: &f64, z: &f64) -> Result<f64> {
        Ok(if h > z {
            1.0
        } else if h < z {
            -1.0
        } else {
            0.0
        })
    }

    fn sample_hypothesis(&self, rng: &mut dyn RngCore) -> f64 {
        uniform(rng, -self.k, self.k)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> f64 {
        uniform(rng, -self.k, self.k)
    }

    fn hindsight_tracker(&self) -> Box<dyn HindsightTracker<Self> + '_> {
        Box::new(MedianTracker {
            problem: self,
            lower: BinaryHeap::new(),
            upper: BinaryHeap::new(),
            lower_sum: CompensatedSum::new(),
            upper_sum: CompensatedSum::new(),
            points: Vec::new(),
        })
    }
}

impl ScalarProblem for Absolute1d {
    fn interval(&self) -> (f64, f64) {
        (-self.k, self.k)
    }

    fn add_loss_terms(&self, z: &f64, objective: &mut PiecewiseQuadratic) -> bool {
        objective.add_kink(*z, 1.0);
        true
    }

    fn is_convex(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Ordered(f64);

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Two-heap running lower median; `Σ|h − z|` comes from the half sums
/// unless clipping moves `h` off the median.
struct MedianTracker<'a> {
    problem: &'a Absolute1d,
    lower: BinaryHeap<Ordered>,
    upper: BinaryHeap<Reverse<Ordered>>,
    lower_sum: CompensatedSum,
    upper_sum: CompensatedSum,
    points: Vec<f64>,
}

impl HindsightTracker<Absolute1d> for MedianTracker<'_> {
    fn push(&mut self, z: &f64) {
        let z = *z;
        self.points.push(z);
        if self.lower.peek().is_none_or(|top| z <= top.0) {
            self.lower.push(Ordered(z));
            self.lower_sum.add(z);
        } else {
            self.upper.push(Reverse(Ordered(z)));
            self.upper_sum.add(z);
        }
        // Keep |lower| = ceil(t/2) so its top is the lower median.
        if self.lower.len() > self.upper.len() + 1 {
            let Ordered(x) = self.lower.pop().expect("non-empty");
            self.lower_sum.add(-x);
            self.upper.push(Reverse(Ordered(x)));
            self.upper_sum.add(x);
        } else if self.upper.len() > self.lower.len() {
            let Reverse(Ordered(x)) = self.upper.pop().expect("non-empty");
            self.upper_sum.add(-x);
            self.lower.push(Ordered(x));
            self.lower_sum.add(x);
        }
    }

    fn best(&self) -> Result<(f64, f64)> {
        let Some(Ordered(median)) = self.lower.peek().copied() else {
            return Ok((self.problem.default_hypothesis(), 0.0));
        };
        let k = self.problem.k;
        if median.abs() > k {
            let h = median.clamp(-k, k);
            return Ok((h, total_loss(self.problem, &h, &self.points)));
        }
        let value = median * self.lower.len() as f64 - self.lower_sum.value() + self.upper_sum.value()
            - median * self.upper.len() as f64;
        Ok((median, value))
    }
}
