use super::{Learner, Play, Session};
use crate::error::{invalid_param, Error, Result};
use crate::objective::{golden_section, PiecewiseQuadratic};
use crate::problems::{total_loss, ScalarProblem};
use crate::sum;

/// Shape of each regularizer `r_i(h) = λ_i · penalty(h − c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// `(h − c)²`
    Quadratic,
    /// `|h − c|`
    AbsoluteDeviation,
}

/// The weights `λ_i`, `i ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// `λ_i = scale / √max(1, i)`.
    InverseSqrt { scale: f64 },
    /// `λ_i = values[i]`, and 0 past the end.
    Explicit(Vec<f64>),
}

impl Weights {
    pub fn lambda(&self, i: usize) -> f64 {
        match self {
            Weights::InverseSqrt { scale } => scale / (i.max(1) as f64).sqrt(),
            Weights::Explicit(v) => v.get(i).copied().unwrap_or(0.0),
        }
    }
}

/// A sequence of regularizers `r_i(h) = λ_i · penalty(h − center)` with
/// range bounds `ρ_i`, strong-convexity moduli `ν_i` and Lipschitz
/// constants `L_R^i` on a given interval.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizerSchedule {
    pub penalty: Penalty,
    pub weights: Weights,
    pub center: f64,
}

impl RegularizerSchedule {
    pub fn new(penalty: Penalty, weights: Weights, center: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(invalid_param("center", "must be finite"));
        }
        match &weights {
            Weights::InverseSqrt { scale } if !(*scale >= 0.0 && scale.is_finite()) => {
                return Err(invalid_param("scale", format!("must be non-negative, got {scale}")));
            }
            Weights::Explicit(v) if v.iter().any(|l| !(*l >= 0.0 && l.is_finite())) => {
                return Err(invalid_param("lambda", "weights must be non-negative and finite"));
            }
            _ => {}
        }
        Ok(Self { penalty, weights, center })
    }

    /// All `r_i ≡ 0`.
    pub fn zero() -> Self {
        Self {
            penalty: Penalty::Quadratic,
            weights: Weights::Explicit(Vec::new()),
            center: 0.0,
        }
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.weights.lambda(i)
    }

    fn shape(&self, h: f64) -> f64 {
        match self.penalty {
            Penalty::Quadratic => (h - self.center) * (h - self.center),
            Penalty::AbsoluteDeviation => (h - self.center).abs(),
        }
    }

    /// `r_i(h)`.
    pub fn eval(&self, i: usize, h: f64) -> f64 {
        self.lambda(i) * self.shape(h)
    }

    pub fn add_terms(&self, i: usize, objective: &mut PiecewiseQuadratic) {
        let l = self.lambda(i);
        match self.penalty {
            Penalty::Quadratic => objective.add_squared_distance(self.center, l),
            Penalty::AbsoluteDeviation => objective.add_kink(self.center, l),
        }
    }

    /// `Σ_{j=0}^{t} r_j(h)`.
    pub fn cumulative(&self, t: usize, h: f64) -> f64 {
        sum::sum((0..=t).map(|j| self.eval(j, h)))
    }

    /// `ρ_i = sup_{h,h′ ∈ [lo,hi]} |r_i(h) − r_i(h′)|`.
    pub fn rho(&self, i: usize, lo: f64, hi: f64) -> f64 {
        let max = self.shape(lo).max(self.shape(hi));
        let min = if (lo..=hi).contains(&self.center) {
            0.0
        } else {
            self.shape(lo).min(self.shape(hi))
        };
        self.lambda(i) * (max - min)
    }

    /// `Σ_{i=0}^{n−1} ρ_i`.
    pub fn rho_sum(&self, n: usize, lo: f64, hi: f64) -> f64 {
        sum::sum((0..n).map(|i| self.rho(i, lo, hi)))
    }

    /// Strong-convexity modulus `ν_i` (0 for the absolute penalty).
    pub fn strong_convexity(&self, i: usize) -> f64 {
        match self.penalty {
            Penalty::Quadratic => 2.0 * self.lambda(i),
            Penalty::AbsoluteDeviation => 0.0,
        }
    }

    /// Lipschitz constant `L_R^i` of `r_i` on `[lo, hi]`.
    pub fn lipschitz(&self, i: usize, lo: f64, hi: f64) -> f64 {
        match self.penalty {
            Penalty::Quadratic => 2.0 * self.lambda(i) * (lo - self.center).abs().max((hi - self.center).abs()),
            Penalty::AbsoluteDeviation => self.lambda(i),
        }
    }
}

/// Minimizer over the problem interval of
/// `Σ_{i=0}^{m} r_i(h) + Σ_{i=1}^{m} f(h, z_i)` with `m = data.len()`.
///
/// Exact when every loss term is piecewise quadratic, golden-section when the
/// loss is merely convex.
pub fn rerm_select<P: ScalarProblem>(problem: &P, data: &[P::Point], schedule: &RegularizerSchedule) -> Result<f64> {
    let (lo, hi) = problem.interval();
    let mut objective = PiecewiseQuadratic::new();
    schedule.add_terms(0, &mut objective);
    // Same term order as the online session, so both paths agree bit for bit.
    let mut exact = true;
    for (i, z) in data.iter().enumerate() {
        if !problem.add_loss_terms(z, &mut objective) {
            exact = false;
            break;
        }
        schedule.add_terms(i + 1, &mut objective);
    }
    if exact {
        return Ok(objective.minimize(lo, hi));
    }
    if !problem.is_convex() {
        return Err(Error::UnsupportedObjective(format!(
            "`{}` is not convex and has no closed-form regularized minimizer",
            problem.name()
        )));
    }
    let t = data.len();
    Ok(golden_section(
        |h| total_loss(problem, &h, data) + schedule.cumulative(t, h),
        lo,
        hi,
        1e-10,
    ))
}

/// Follow the regularized leader: RERM on the prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct Ftrl {
    pub schedule: RegularizerSchedule,
}

impl Ftrl {
    pub fn new(schedule: RegularizerSchedule) -> Self {
        Self { schedule }
    }
}

impl<P: ScalarProblem> Learner<P> for Ftrl {
    fn name(&self) -> String {
        "ftrl".into()
    }

    fn select(&self, problem: &P, data: &[P::Point]) -> Result<Play<f64>> {
        rerm_select(problem, data, &self.schedule).map(Play::Pure)
    }

    fn start<'a>(&'a self, problem: &'a P) -> Box<dyn Session<P> + 'a> {
        ftrl_session(&self.schedule, problem)
    }
}

pub(crate) fn ftrl_session<'a, P: ScalarProblem>(schedule: &'a RegularizerSchedule, problem: &'a P) -> Box<dyn Session<P> + 'a> {
    let mut objective = PiecewiseQuadratic::new();
    schedule.add_terms(0, &mut objective);
    Box::new(FtrlSession {
        schedule,
        problem,
        objective,
        data: Vec::new(),
        exact: true,
    })
}

/// Keeps the objective incrementally while every term is piecewise
/// quadratic; otherwise falls back to a fresh solve each round.
struct FtrlSession<'a, P: ScalarProblem> {
    schedule: &'a RegularizerSchedule,
    problem: &'a P,
    objective: PiecewiseQuadratic,
    data: Vec<P::Point>,
    exact: bool,
}

impl<P: ScalarProblem> Session<P> for FtrlSession<'_, P> {
    fn play(&mut self) -> Result<Play<f64>> {
        if self.exact {
            let (lo, hi) = self.problem.interval();
            Ok(Play::Pure(self.objective.minimize(lo, hi)))
        } else {
            rerm_select(self.problem, &self.data, self.schedule).map(Play::Pure)
        }
    }

    fn observe(&mut self, z: &P::Point) -> Result<()> {
        self.data.push(z.clone());
        if self.exact {
            self.exact = self.problem.add_loss_terms(z, &mut self.objective);
            self.schedule.add_terms(self.data.len(), &mut self.objective);
        }
        Ok(())
    }
}
