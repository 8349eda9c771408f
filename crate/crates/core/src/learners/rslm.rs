use super::{rerm_select, Learner, Play, RegularizerSchedule, Session};
use crate::error::Result;
use crate::objective::PiecewiseQuadratic;
use crate::problems::{Problem, ScalarProblem};

/// First-order surrogate `ℓ(h) = f(a, z) + g·(h − a)` built at anchor `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surrogate {
    pub anchor: f64,
    pub value: f64,
    pub slope: f64,
}

impl Surrogate {
    pub fn eval(&self, h: f64) -> f64 {
        self.value + self.slope * (h - self.anchor)
    }

    fn add_terms(&self, objective: &mut PiecewiseQuadratic) {
        objective.add_constant(self.value - self.slope * self.anchor);
        objective.add_linear(self.slope);
    }
}

/// Linearizes `f(·, z)` at `anchor` using the problem's (sub)gradient.
pub fn linearize<P: Problem<Hypothesis = f64>>(problem: &P, anchor: f64, z: &P::Point) -> Result<Surrogate> {
    let slope = problem.gradient(&anchor, z)?;
    Ok(Surrogate {
        anchor,
        value: problem.loss(&anchor, z),
        slope,
    })
}

/// Minimizer over the problem interval of
/// `Σ_{i=0}^{n} r_i(h) + Σ_{i=1}^{n} ℓ_i(h)` for `n` surrogates.
pub fn rslm_select<P: ScalarProblem>(problem: &P, surrogates: &[Surrogate], schedule: &RegularizerSchedule) -> f64 {
    let mut objective = PiecewiseQuadratic::new();
    schedule.add_terms(0, &mut objective);
    for (i, s) in surrogates.iter().enumerate() {
        s.add_terms(&mut objective);
        schedule.add_terms(i + 1, &mut objective);
    }
    let (lo, hi) = problem.interval();
    objective.minimize(lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateKind {
    /// `ℓ_i = f`, which makes the learner a plain RERM.
    Exact,
    /// Linearization at the learner's own round-`i` hypothesis.
    Linear,
}

/// Regularized surrogate-loss minimizer. With linear surrogates and a
/// quadratic regularizer this is lazy projected online gradient descent.
#[derive(Debug, Clone, PartialEq)]
pub struct Rslm {
    pub schedule: RegularizerSchedule,
    pub kind: SurrogateKind,
}

impl Rslm {
    pub fn new(schedule: RegularizerSchedule, kind: SurrogateKind) -> Self {
        Self { schedule, kind }
    }

    /// Surrogates built along the learner's own trajectory on `data`, and the
    /// final hypothesis.
    pub fn trajectory<P: ScalarProblem>(&self, problem: &P, data: &[P::Point]) -> Result<(Vec<Surrogate>, f64)> {
        let (lo, hi) = problem.interval();
        let mut objective = PiecewiseQuadratic::new();
        self.schedule.add_terms(0, &mut objective);
        let mut surrogates = Vec::with_capacity(data.len());
        for (i, z) in data.iter().enumerate() {
            let s = linearize(problem, objective.minimize(lo, hi), z)?;
            s.add_terms(&mut objective);
            self.schedule.add_terms(i + 1, &mut objective);
            surrogates.push(s);
        }
        Ok((surrogates, objective.minimize(lo, hi)))
    }
}

impl<P: ScalarProblem> Learner<P> for Rslm {
    fn name(&self) -> String {
        match self.kind {
            SurrogateKind::Exact => "rslm_exact".into(),
            SurrogateKind::Linear => "rslm".into(),
        }
    }

    fn select(&self, problem: &P, data: &[P::Point]) -> Result<Play<f64>> {
        match self.kind {
            SurrogateKind::Exact => rerm_select(problem, data, &self.schedule).map(Play::Pure),
            SurrogateKind::Linear => self.trajectory(problem, data).map(|(_, h)| Play::Pure(h)),
        }
    }

    fn is_symmetric(&self) -> bool {
        self.kind == SurrogateKind::Exact
    }

    fn start<'a>(&'a self, problem: &'a P) -> Box<dyn Session<P> + 'a> {
        match self.kind {
            SurrogateKind::Exact => super::rerm::ftrl_session(&self.schedule, problem),
            SurrogateKind::Linear => {
                let mut objective = PiecewiseQuadratic::new();
                self.schedule.add_terms(0, &mut objective);
                Box::new(LinearSession {
                    learner: self,
                    problem,
                    objective,
                    rounds: 0,
                })
            }
        }
    }
}

struct LinearSession<'a, P> {
    learner: &'a Rslm,
    problem: &'a P,
    objective: PiecewiseQuadratic,
    rounds: usize,
}

impl<P: ScalarProblem> Session<P> for LinearSession<'_, P> {
    fn play(&mut self) -> Result<Play<f64>> {
        let (lo, hi) = self.problem.interval();
        Ok(Play::Pure(self.objective.minimize(lo, hi)))
    }

    fn observe(&mut self, z: &P::Point) -> Result<()> {
        let (lo, hi) = self.problem.interval();
        let s = linearize(self.problem, self.objective.minimize(lo, hi), z)?;
        s.add_terms(&mut self.objective);
        self.rounds += 1;
        self.learner.schedule.add_terms(self.rounds, &mut self.objective);
        Ok(())
    }
}
