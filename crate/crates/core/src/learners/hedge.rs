use std::sync::Arc;

use super::{Learner, Mixture, Play, Session};
use crate::error::{invalid_param, Error, Result};
use crate::problems::Problem;
use crate::sum::{self, CompensatedSum};

/// A probability vector over `d` experts.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertDistribution {
    weights: Vec<f64>,
}

impl ExpertDistribution {
    /// Validates non-negativity and normalization (within 1e-12).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyExpertSet);
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(invalid_param("weights", "must be finite and non-negative"));
        }
        let total = sum::sum(weights.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid_param("weights", format!("sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyExpertSet);
        }
        Ok(Self {
            weights: vec![1.0 / d as f64; d],
        })
    }

    pub fn point_mass(d: usize, index: usize) -> Result<Self> {
        if index >= d {
            return Err(invalid_param("index", format!("{index} out of range for {d} experts")));
        }
        let mut weights = vec![0.0; d];
        weights[index] = 1.0;
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Regularization weights `λ_t` of Hedge viewed as a KL-regularized RERM,
/// with step sizes `η_t = 1 / Σ_{j=0}^{t} λ_j`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSchedule {
    /// `λ_t = scale / √max(1, t)`.
    InverseSqrt { scale: f64 },
    /// `λ_t = λ` for every `t`.
    Constant(f64),
    /// `λ_t = values[t]`; the last value repeats past the end.
    Explicit(Vec<f64>),
}

impl LambdaSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            LambdaSchedule::InverseSqrt { scale } => *scale > 0.0 && scale.is_finite(),
            LambdaSchedule::Constant(l) => *l > 0.0 && l.is_finite(),
            LambdaSchedule::Explicit(v) => {
                v.first().is_some_and(|l| *l > 0.0)
                    && v.iter().all(|l| *l >= 0.0 && l.is_finite())
                    && v.windows(2).all(|w| w[1] <= w[0])
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid_param("lambda", format!("{self:?} is not a positive non-increasing schedule")))
        }
    }

    pub fn lambda(&self, t: usize) -> f64 {
        match self {
            LambdaSchedule::InverseSqrt { scale } => scale / (t.max(1) as f64).sqrt(),
            LambdaSchedule::Constant(l) => *l,
            LambdaSchedule::Explicit(v) => v.get(t).or(v.last()).copied().unwrap_or(0.0),
        }
    }

    /// `Σ_{j=0}^{t} λ_j`.
    pub fn cumulative(&self, t: usize) -> f64 {
        let mut acc = CompensatedSum::new();
        for j in 0..=t {
            acc.add(self.lambda(j));
        }
        acc.value()
    }

    /// `η_t = 1 / Σ_{j=0}^{t} λ_j`.
    pub fn eta(&self, t: usize) -> f64 {
        1.0 / self.cumulative(t)
    }
}

/// `λ_t = B·√(1/(8 ln d · max(1, t)))`.
pub fn default_lambda_schedule(bound: f64, d: usize) -> Result<LambdaSchedule> {
    if d < 2 {
        return Err(Error::DegenerateExpertSet(d));
    }
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(invalid_param("B", format!("must be positive, got {bound}")));
    }
    Ok(LambdaSchedule::InverseSqrt {
        scale: bound / (8.0 * (d as f64).ln()).sqrt(),
    })
}

/// `θ_i ∝ exp(−η·C_i)`, shifted by `min C` before exponentiating.
pub fn hedge_select(cumulative_losses: &[f64], eta: f64) -> Result<ExpertDistribution> {
    if cumulative_losses.is_empty() {
        return Err(Error::EmptyExpertSet);
    }
    if cumulative_losses.iter().any(|c| !c.is_finite()) {
        return Err(invalid_param("cumulative_losses", "must be finite"));
    }
    let min = cumulative_losses.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = cumulative_losses.iter().map(|c| (-eta * (c - min)).exp()).collect();
    let total = sum::sum(raw.iter().copied());
    Ok(ExpertDistribution {
        weights: raw.into_iter().map(|w| w / total).collect(),
    })
}

/// `KL(θ ‖ uniform) = Σ θ_i ln(d·θ_i)`, with `0 ln 0 = 0`.
pub fn kl_to_uniform(theta: &ExpertDistribution) -> f64 {
    let d = theta.len() as f64;
    sum::sum(
        theta
            .weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| w * (d * w).ln()),
    )
}

/// `Σ_{i=1}^{t} E_{h∼θ}[f(h, z_i)] + (Σ_{j=0}^{t} λ_j)·KL(θ ‖ U)` for a
/// `d × m` loss table (row per expert).
pub fn hedge_rerm_objective(theta: &ExpertDistribution, loss_table: &[Vec<f64>], schedule: &LambdaSchedule, t: usize) -> Result<f64> {
    if loss_table.len() != theta.len() {
        return Err(Error::LengthMismatch {
            expected: theta.len(),
            actual: loss_table.len(),
        });
    }
    let mut acc = CompensatedSum::new();
    for (row, &w) in loss_table.iter().zip(theta.weights()) {
        if row.len() < t {
            return Err(Error::LengthMismatch {
                expected: t,
                actual: row.len(),
            });
        }
        for &l in &row[..t] {
            acc.add(w * l);
        }
    }
    acc.add(schedule.cumulative(t) * kl_to_uniform(theta));
    Ok(acc.value())
}

/// Hedge / weighted majority over a fixed expert list.
#[derive(Debug, Clone, PartialEq)]
pub struct Hedge<H> {
    experts: Arc<[H]>,
    schedule: LambdaSchedule,
}

impl<H: Clone> Hedge<H> {
    pub fn new(experts: Vec<H>, schedule: LambdaSchedule) -> Result<Self> {
        if experts.is_empty() {
            return Err(Error::EmptyExpertSet);
        }
        schedule.validate()?;
        Ok(Self {
            experts: experts.into(),
            schedule,
        })
    }

    /// Hedge with the default schedule for loss range `bound`.
    pub fn with_default_schedule(experts: Vec<H>, bound: f64) -> Result<Self> {
        let schedule = default_lambda_schedule(bound, experts.len())?;
        Self::new(experts, schedule)
    }

    pub fn experts(&self) -> &[H] {
        &self.experts
    }

    pub fn schedule(&self) -> &LambdaSchedule {
        &self.schedule
    }

    fn mixture(&self, totals: &[f64], eta: f64) -> Result<Play<H>> {
        Ok(Play::Mixed(Mixture {
            experts: Arc::clone(&self.experts),
            weights: hedge_select(totals, eta)?,
        }))
    }

    fn totals<P: Problem<Hypothesis = H>>(&self, problem: &P, data: &[P::Point]) -> Vec<CompensatedSum> {
        self.experts
            .iter()
            .map(|h| {
                let mut acc = CompensatedSum::new();
                for z in data {
                    acc.add(problem.loss(h, z));
                }
                acc
            })
            .collect()
    }
}

impl<P: Problem> Learner<P> for Hedge<P::Hypothesis> {
    fn name(&self) -> String {
        format!("hedge(d={})", self.experts.len())
    }

    fn select(&self, problem: &P, data: &[P::Point]) -> Result<Play<P::Hypothesis>> {
        let totals: Vec<f64> = self.totals(problem, data).iter().map(|c| c.value()).collect();
        self.mixture(&totals, self.schedule.eta(data.len()))
    }

    fn leave_one_out(&self, problem: &P, data: &[P::Point]) -> Result<Vec<Play<P::Hypothesis>>> {
        let Some(last) = data.len().checked_sub(1) else {
            return Ok(Vec::new());
        };
        let totals = self.totals(problem, data);
        let eta = self.schedule.eta(last);
        data.iter()
            .map(|z| {
                let reduced: Vec<f64> = self
                    .experts
                    .iter()
                    .zip(&totals)
                    .map(|(h, c)| {
                        let mut c = *c;
                        c.add(-problem.loss(h, z));
                        c.value()
                    })
                    .collect();
                self.mixture(&reduced, eta)
            })
            .collect()
    }

    fn start<'a>(&'a self, problem: &'a P) -> Box<dyn Session<P> + 'a> {
        let mut lambda = CompensatedSum::new();
        lambda.add(self.schedule.lambda(0));
        Box::new(HedgeSession {
            learner: self,
            problem,
            totals: vec![CompensatedSum::new(); self.experts.len()],
            lambda,
            rounds: 0,
        })
    }
}

struct HedgeSession<'a, P: Problem> {
    learner: &'a Hedge<P::Hypothesis>,
    problem: &'a P,
    totals: Vec<CompensatedSum>,
    lambda: CompensatedSum,
    rounds: usize,
}

impl<P: Problem> Session<P> for HedgeSession<'_, P> {
    fn play(&mut self) -> Result<Play<P::Hypothesis>> {
        let totals: Vec<f64> = self.totals.iter().map(|c| c.value()).collect();
        self.learner.mixture(&totals, 1.0 / self.lambda.value())
    }

    fn observe(&mut self, z: &P::Point) -> Result<()> {
        for (h, c) in self.learner.experts.iter().zip(&mut self.totals) {
            c.add(self.problem.loss(h, z));
        }
        self.rounds += 1;
        self.lambda.add(self.learner.schedule.lambda(self.rounds));
        Ok(())
    }
}
