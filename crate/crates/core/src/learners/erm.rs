use super::{Learner, Play};
use crate::error::Result;
use crate::problems::{search_minimizer, Problem};

/// `argmin_h F_S(h)` with the problem's canonical tie-break; the default
/// hypothesis on empty data.
pub fn erm_select<P: Problem>(problem: &P, data: &[P::Point]) -> Result<P::Hypothesis> {
    if data.is_empty() {
        return Ok(problem.default_hypothesis());
    }
    match problem.exact_erm(data) {
        Some(h) => Ok(h),
        None => search_minimizer(problem, data),
    }
}

/// Follow the leader: ERM on the prefix.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FollowTheLeader;

impl<P: Problem> Learner<P> for FollowTheLeader {
    fn name(&self) -> String {
        "ftl".into()
    }

    fn select(&self, problem: &P, data: &[P::Point]) -> Result<Play<P::Hypothesis>> {
        erm_select(problem, data).map(Play::Pure)
    }

    fn leave_one_out(&self, problem: &P, data: &[P::Point]) -> Result<Vec<Play<P::Hypothesis>>> {
        if data.len() > 1 {
            if let Some(hs) = problem.exact_erm_leave_one_out(data) {
                return Ok(hs.into_iter().map(Play::Pure).collect());
            }
        }
        (0..data.len())
            .map(|i| erm_select(problem, &crate::dataset::without(data, i)).map(Play::Pure))
            .collect()
    }
}
