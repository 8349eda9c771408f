//! Online learners built from batch selection rules: ERM / follow-the-leader,
//! regularized ERM / FTRL, regularized surrogate-loss minimizers, and Hedge.

mod erm;
mod hedge;
mod rerm;
mod rslm;

pub use erm::{erm_select, FollowTheLeader};
pub use hedge::{
    default_lambda_schedule, hedge_rerm_objective, hedge_select, kl_to_uniform, ExpertDistribution, Hedge, LambdaSchedule,
};
pub use rerm::{rerm_select, Ftrl, Penalty, RegularizerSchedule, Weights};
pub use rslm::{linearize, rslm_select, Rslm, Surrogate, SurrogateKind};

use std::sync::Arc;

use crate::dataset;
use crate::error::Result;
use crate::problems::Problem;
use crate::sum::CompensatedSum;

/// A finite mixture of hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture<H> {
    pub experts: Arc<[H]>,
    pub weights: ExpertDistribution,
}

/// What a learner commits to in a round: one hypothesis, or a distribution
/// over experts whose loss is taken in expectation.
#[derive(Debug, Clone, PartialEq)]
pub enum Play<H> {
    Pure(H),
    Mixed(Mixture<H>),
}

impl<H> Play<H> {
    /// `E_{h∼play}[g(h)]`.
    pub fn expectation(&self, g: impl Fn(&H) -> f64) -> f64 {
        match self {
            Play::Pure(h) => g(h),
            Play::Mixed(m) => {
                let mut acc = CompensatedSum::new();
                for (h, &w) in m.experts.iter().zip(m.weights.weights()) {
                    if w != 0.0 {
                        acc.add(w * g(h));
                    }
                }
                acc.value()
            }
        }
    }

    /// `E_{h∼play}[f(h, z)]`.
    pub fn expected_loss<P: Problem<Hypothesis = H>>(&self, problem: &P, z: &P::Point) -> f64 {
        self.expectation(|h| problem.loss(h, z))
    }

    pub fn as_pure(&self) -> Option<&H> {
        match self {
            Play::Pure(h) => Some(h),
            Play::Mixed(_) => None,
        }
    }
}

/// A learner: a selection rule `A` applied to the prefix seen so far.
pub trait Learner<P: Problem>: Send + Sync {
    fn name(&self) -> String;

    /// `A(S)`.
    fn select(&self, problem: &P, data: &[P::Point]) -> Result<Play<P::Hypothesis>>;

    /// Whether `A(S)` ignores the order of `S`.
    fn is_symmetric(&self) -> bool {
        true
    }

    /// `A(S^{\i})` for every `i`.
    fn leave_one_out(&self, problem: &P, data: &[P::Point]) -> Result<Vec<Play<P::Hypothesis>>> {
        (0..data.len())
            .map(|i| self.select(problem, &dataset::without(data, i)))
            .collect()
    }

    /// Starts an online run. The default replays `select` on the growing
    /// prefix; learners with cheap sufficient statistics override it.
    fn start<'a>(&'a self, problem: &'a P) -> Box<dyn Session<P> + 'a> {
        Box::new(ReplaySession {
            learner: self,
            problem,
            data: Vec::new(),
        })
    }
}

/// One online run: `play` returns `A(S_{t})`, `observe` appends `z_{t+1}`.
pub trait Session<P: Problem> {
    fn play(&mut self) -> Result<Play<P::Hypothesis>>;
    fn observe(&mut self, z: &P::Point) -> Result<()>;
}

struct ReplaySession<'a, P: Problem, L: ?Sized> {
    learner: &'a L,
    problem: &'a P,
    data: Vec<P::Point>,
}

impl<P: Problem, L: Learner<P> + ?Sized> Session<P> for ReplaySession<'_, P, L> {
    fn play(&mut self) -> Result<Play<P::Hypothesis>> {
        self.learner.select(self.problem, &self.data)
    }

    fn observe(&mut self, z: &P::Point) -> Result<()> {
        self.data.push(z.clone());
        Ok(())
    }
}

/// Always plays the same hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct Constant<H>(pub H);

impl<P: Problem> Learner<P> for Constant<P::Hypothesis> {
    fn name(&self) -> String {
        format!("constant({:?})", self.0)
    }

    fn select(&self, _problem: &P, _data: &[P::Point]) -> Result<Play<P::Hypothesis>> {
        Ok(Play::Pure(self.0.clone()))
    }

    fn leave_one_out(&self, _problem: &P, data: &[P::Point]) -> Result<Vec<Play<P::Hypothesis>>> {
        Ok(vec![Play::Pure(self.0.clone()); data.len()])
    }
}

impl<P: Problem, L: Learner<P> + ?Sized> Learner<P> for Box<L> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn select(&self, problem: &P, data: &[P::Point]) -> Result<Play<P::Hypothesis>> {
        (**self).select(problem, data)
    }
    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }
    fn leave_one_out(&self, problem: &P, data: &[P::Point]) -> Result<Vec<Play<P::Hypothesis>>> {
        (**self).leave_one_out(problem, data)
    }
    fn start<'a>(&'a self, problem: &'a P) -> Box<dyn Session<P> + 'a> {
        (**self).start(problem)
    }
}

#[cfg(test)]
mod tests;
