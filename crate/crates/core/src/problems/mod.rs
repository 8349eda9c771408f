//! Catalog of concrete `(ℋ, 𝒵, f)` instances with exact ERM oracles and
//! smoothness metadata.

mod absolute;
mod binary;
mod catalog;
mod dyadic;
mod experts;
mod quadratic;
mod rationality;
mod threshold;

pub use absolute::Absolute1d;
pub use binary::{BinaryGame, RandomizedBinary};
pub use catalog::{make_problem, AnyProblem, Params, CATALOG};
pub use dyadic::Dyadic;
pub use experts::FiniteExperts;
pub use quadratic::Quadratic1d;
pub use rationality::{NumberKind, RationalityGame, TaggedReal};
pub use threshold::{Coordinate, Label, LabeledPoint, ThresholdClass};

use std::fmt::Debug;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::objective::{golden_section, PiecewiseQuadratic};
use crate::sum::{self, CompensatedSum};

/// Constants describing the loss on the declared domains.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossMetadata {
    /// Bound `B` on `|f(h,z) − f(h′,z)|`.
    pub regret_bound: f64,
    /// Lipschitz constant of `f(·, z)` in the hypothesis.
    pub lipschitz: Option<f64>,
    /// Strong-convexity modulus of `f(·, z)`.
    pub strong_convexity: Option<f64>,
    /// Diameter of the hypothesis space.
    pub diameter: Option<f64>,
    /// Dimension of the hypothesis space (0 for finite spaces).
    pub dimension: usize,
}

/// How to search ℋ when the problem has no closed-form minimizer.
#[derive(Debug, Clone)]
pub enum SearchSpace<H> {
    /// A bounded real interval; `embed` maps a scalar into ℋ.
    Interval { lo: f64, hi: f64, embed: fn(f64) -> H },
    /// Every hypothesis, in canonical (tie-breaking) order.
    Finite(Vec<H>),
    None,
}

/// A learning problem `(ℋ, 𝒵, f)`.
pub trait Problem: Send + Sync {
    type Hypothesis: Clone + Debug + PartialEq + Send + Sync;
    type Point: Clone + Debug + PartialEq + Send + Sync;

    fn name(&self) -> &'static str;

    fn loss(&self, h: &Self::Hypothesis, z: &Self::Point) -> f64;

    fn metadata(&self) -> LossMetadata;

    /// `A(∅)` for every learner without a regularizer.
    fn default_hypothesis(&self) -> Self::Hypothesis;

    fn contains_point(&self, z: &Self::Point) -> bool;

    fn contains_hypothesis(&self, h: &Self::Hypothesis) -> bool;

    /// Exact empirical risk minimizer with the canonical tie-break, or `None`
    /// if the problem ships no oracle.
    fn exact_erm(&self, points: &[Self::Point]) -> Option<Self::Hypothesis>;

    /// `A(S^{\i})` for every `i`. Problems with sufficient statistics override
    /// this to avoid `m` full retrains.
    fn exact_erm_leave_one_out(&self, points: &[Self::Point]) -> Option<Vec<Self::Hypothesis>> {
        (0..points.len())
            .map(|i| self.exact_erm(&crate::dataset::without(points, i)))
            .collect()
    }

    fn search_space(&self) -> SearchSpace<Self::Hypothesis> {
        SearchSpace::None
    }

    /// (Sub)gradient of `f(·, z)` at `h`.
    fn gradient(&self, _h: &Self::Hypothesis, _z: &Self::Point) -> Result<f64> {
        Err(Error::NoGradient(self.name().to_string()))
    }

    fn sample_hypothesis(&self, rng: &mut dyn RngCore) -> Self::Hypothesis;

    fn sample_point(&self, rng: &mut dyn RngCore) -> Self::Point;

    /// Incremental best-in-hindsight tracker; the default recomputes from
    /// scratch on every push.
    fn hindsight_tracker(&self) -> Box<dyn HindsightTracker<Self> + '_>
    where
        Self: Sized,
    {
        Box::new(RecomputeTracker {
            problem: self,
            points: Vec::new(),
        })
    }
}

/// A problem whose hypotheses are reals in a closed interval, so regularized
/// objectives can be minimized by 1-D convex search.
pub trait ScalarProblem: Problem<Hypothesis = f64> {
    fn interval(&self) -> (f64, f64);

    /// Adds `f(·, z)` to a piecewise-quadratic objective, or returns `false` if
    /// the loss has no such form.
    fn add_loss_terms(&self, _z: &Self::Point, _objective: &mut PiecewiseQuadratic) -> bool {
        false
    }

    /// Whether `f(·, z)` is convex, which licenses the golden-section fallback.
    fn is_convex(&self) -> bool;
}

/// Running `min_h Σ_{j ≤ t} f(h, z_j)` over a growing prefix.
pub trait HindsightTracker<P: Problem> {
    fn push(&mut self, z: &P::Point);
    fn best(&self) -> Result<(P::Hypothesis, f64)>;
}

struct RecomputeTracker<'a, P: Problem> {
    problem: &'a P,
    points: Vec<P::Point>,
}

impl<P: Problem> HindsightTracker<P> for RecomputeTracker<'_, P> {
    fn push(&mut self, z: &P::Point) {
        self.points.push(z.clone());
    }

    fn best(&self) -> Result<(P::Hypothesis, f64)> {
        best_in_hindsight(self.problem, &self.points)
    }
}

/// Total loss `Σ_i f(h, z_i)`.
pub fn total_loss<P: Problem>(problem: &P, h: &P::Hypothesis, points: &[P::Point]) -> f64 {
    sum::sum(points.iter().map(|z| problem.loss(h, z)))
}

/// Empirical risk `F_S(h) = (1/m) Σ_i f(h, z_i)`.
pub fn empirical_risk<P: Problem>(problem: &P, h: &P::Hypothesis, points: &[P::Point]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(total_loss(problem, h, points) / points.len() as f64)
}

/// Minimizer of the total loss over ℋ and its (un-averaged) value.
///
/// Uses the problem's exact oracle when present, otherwise golden-section on
/// an interval (tolerance 1e-10) or an exhaustive scan of a finite space.
pub fn best_in_hindsight<P: Problem>(problem: &P, points: &[P::Point]) -> Result<(P::Hypothesis, f64)> {
    let h = match problem.exact_erm(points) {
        Some(h) => h,
        None => search_minimizer(problem, points)?,
    };
    let value = total_loss(problem, &h, points);
    Ok((h, value))
}

/// Fallback search for `argmin_h Σ f(h, z_i)` without an exact oracle.
pub fn search_minimizer<P: Problem>(problem: &P, points: &[P::Point]) -> Result<P::Hypothesis> {
    match problem.search_space() {
        SearchSpace::Interval { lo, hi, embed } => {
            let x = golden_section(|x| total_loss(problem, &embed(x), points), lo, hi, 1e-10);
            Ok(embed(x))
        }
        SearchSpace::Finite(candidates) => {
            let mut best: Option<(P::Hypothesis, f64)> = None;
            for h in candidates {
                let v = total_loss(problem, &h, points);
                if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                    best = Some((h, v));
                }
            }
            best.map(|(h, _)| h)
                .ok_or_else(|| Error::NoHindsightOracle(problem.name().to_string()))
        }
        SearchSpace::None => Err(Error::NoHindsightOracle(problem.name().to_string())),
    }
}

/// Running compensated sums of per-hypothesis losses over a finite
/// candidate list; the minimum is the hindsight value.
pub(crate) struct FiniteTracker<'a, P: Problem> {
    problem: &'a P,
    candidates: Vec<P::Hypothesis>,
    totals: Vec<CompensatedSum>,
}

impl<'a, P: Problem> FiniteTracker<'a, P> {
    pub(crate) fn new(problem: &'a P, candidates: Vec<P::Hypothesis>) -> Self {
        let totals = vec![CompensatedSum::new(); candidates.len()];
        Self {
            problem,
            candidates,
            totals,
        }
    }
}

impl<P: Problem> HindsightTracker<P> for FiniteTracker<'_, P> {
    fn push(&mut self, z: &P::Point) {
        for (h, t) in self.candidates.iter().zip(&mut self.totals) {
            t.add(self.problem.loss(h, z));
        }
    }

    fn best(&self) -> Result<(P::Hypothesis, f64)> {
        let mut best = 0;
        for (i, t) in self.totals.iter().enumerate() {
            if t.value() < self.totals[best].value() {
                best = i;
            }
        }
        let h = self
            .candidates
            .get(best)
            .cloned()
            .ok_or(Error::EmptyExpertSet)?;
        Ok((h, self.totals[best].value()))
    }
}

pub(crate) fn uniform(rng: &mut dyn RngCore, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    rng.random_range(lo..=hi)
}

#[cfg(test)]
pub(crate) mod testing {
    //! Shared oracles for problem tests.
    use super::*;

    /// Grid search for the minimum total loss on `[lo, hi]` with `n` steps.
    pub fn grid_min<P: Problem<Hypothesis = f64>>(problem: &P, points: &[P::Point], lo: f64, hi: f64, n: usize) -> f64 {
        (0..=n)
            .map(|k| total_loss(problem, &(lo + (hi - lo) * k as f64 / n as f64), points))
            .fold(f64::INFINITY, f64::min)
    }
}
