//! Name-to-object wiring of learners and adversaries, per problem type.

use serde_json::Value;
use stablab_core::counterexamples::{BalancedErm, IntervalRerm, MatchingPennies, RoundedPennies, ThresholdAdversary, TrackingAdversary};
use stablab_core::covering::{grid_cover, DEFAULT_EXPERT_CAP};
use stablab_core::learners::{
    default_lambda_schedule, Constant, FollowTheLeader, Ftrl, Hedge, LambdaSchedule, Penalty, RegularizerSchedule, Rslm,
    SurrogateKind, Weights,
};
use stablab_core::problems::{
    Absolute1d, BinaryGame, Coordinate, Dyadic, FiniteExperts, Label, LabeledPoint, NumberKind, Problem, Quadratic1d,
    RandomizedBinary, RationalityGame, ScalarProblem, SearchSpace, TaggedReal, ThresholdClass,
};
use stablab_core::sources::{FixedSequence, GreedyExpertAdversary, RandomSource};
use stablab_core::{Adversary, Error, Learner};

use crate::config::{AdversaryConfig, Component, ParamReader};
use crate::error::{config_err, Result};

/// What the bound checks need to know about a wired learner.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LearnerKind {
    Ftl,
    Ftrl { schedule: RegularizerSchedule, lo: f64, hi: f64 },
    Hedge { experts: usize, eps: f64, theorem_schedule: bool },
    Other,
}

pub(crate) struct WiredLearner<P: Problem> {
    pub learner: Box<dyn Learner<P>>,
    pub kind: LearnerKind,
}

impl<P: Problem> WiredLearner<P> {
    fn new(learner: impl Learner<P> + 'static, kind: LearnerKind) -> Self {
        Self {
            learner: Box::new(learner),
            kind,
        }
    }
}

pub(crate) trait Wire: Problem + Sized + 'static {
    fn learner(&self, component: &Component, rounds: usize) -> Result<WiredLearner<Self>>;

    /// Adversaries beyond `random` and `fixed`.
    fn special_adversary(&self, _name: &str) -> Option<Box<dyn Adversary<Self>>> {
        None
    }

    fn parse_point(v: &Value) -> Option<Self::Point>;

    fn adversary(&self, config: &AdversaryConfig, seed: u64) -> Result<Box<dyn Adversary<Self>>> {
        match config.name.as_str() {
            "random" => Ok(Box::new(RandomSource::new(seed))),
            "fixed" => {
                let raw = config.sequence.as_deref().unwrap_or_default();
                let points = raw
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        Self::parse_point(v).ok_or_else(|| {
                            config_err(
                                format!("adversary.sequence[{i}]"),
                                format!("{v} is not a point of `{}`", self.name()),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Box::new(FixedSequence::new(points)))
            }
            name => self.special_adversary(name).ok_or_else(|| {
                config_err("adversary.name", format!("`{name}` cannot play against `{}`", self.name()))
            }),
        }
    }
}

fn unsupported(name: &str, problem: &str, accepted: &str) -> crate::error::HarnessError {
    config_err(
        "learner.name",
        format!("`{name}` is not available for `{problem}` (accepted: {accepted})"),
    )
}

/// `λ_t = c·B/√(ln d · max(1, t))`; without `c`, the schedule the Hedge
/// regret theorem is stated for.
fn hedge_wiring<P: Problem + 'static>(experts: Vec<P::Hypothesis>, eps: f64, bound: f64, c: Option<f64>) -> Result<WiredLearner<P>> {
    let d = experts.len();
    if d > DEFAULT_EXPERT_CAP {
        return Err(Error::CoverTooLarge { size: d, cap: DEFAULT_EXPERT_CAP }.into());
    }
    let theorem_c = 1.0 / 8f64.sqrt();
    let schedule = match (d, c) {
        (0, _) => return Err(Error::EmptyExpertSet.into()),
        (1, c) => LambdaSchedule::Constant(c.unwrap_or(1.0) * bound),
        (d, None) => default_lambda_schedule(bound, d)?,
        (d, Some(c)) => LambdaSchedule::InverseSqrt {
            scale: c * bound / (d as f64).ln().sqrt(),
        },
    };
    let theorem_schedule = c.is_none_or(|c| (c - theorem_c).abs() <= 1e-12);
    Ok(WiredLearner::new(
        Hedge::new(experts, schedule)?,
        LearnerKind::Hedge {
            experts: d,
            eps,
            theorem_schedule,
        },
    ))
}

fn scalar_learner<P: ScalarProblem + 'static>(problem: &P, component: &Component, rounds: usize) -> Result<Option<WiredLearner<P>>> {
    let r = ParamReader::new("learner", component);
    let (lo, hi) = problem.interval();
    let schedule = |penalty| -> Result<RegularizerSchedule> {
        r.allow(&["scale", "center"])?;
        let scale = r.positive("scale", 1.0)?;
        let center = r.get("center").unwrap_or(0.0);
        Ok(RegularizerSchedule::new(penalty, Weights::InverseSqrt { scale }, center)?)
    };
    Ok(Some(match component.name.as_str() {
        "ftl" => {
            r.allow(&[])?;
            WiredLearner::new(FollowTheLeader, LearnerKind::Ftl)
        }
        "ftrl" | "ftrl_abs" => {
            let penalty = if component.name == "ftrl" { Penalty::Quadratic } else { Penalty::AbsoluteDeviation };
            let schedule = schedule(penalty)?;
            WiredLearner::new(Ftrl::new(schedule.clone()), LearnerKind::Ftrl { schedule, lo, hi })
        }
        "rslm" => WiredLearner::new(Rslm::new(schedule(Penalty::Quadratic)?, SurrogateKind::Linear), LearnerKind::Other),
        "rslm_exact" => {
            let schedule = schedule(Penalty::Quadratic)?;
            WiredLearner::new(Rslm::new(schedule.clone(), SurrogateKind::Exact), LearnerKind::Ftrl { schedule, lo, hi })
        }
        "constant" => {
            r.allow(&["h"])?;
            let h = r.get("h").unwrap_or_else(|| problem.default_hypothesis());
            if !problem.contains_hypothesis(&h) {
                return Err(config_err(r.field("h"), format!("{h} is outside [{lo}, {hi}]")));
            }
            WiredLearner::new(Constant(h), LearnerKind::Other)
        }
        "hedge" => {
            r.allow(&["eps", "c"])?;
            let meta = problem.metadata();
            let k = meta
                .lipschitz
                .ok_or_else(|| config_err("learner.name", format!("`{}` has no Lipschitz constant to build a cover", problem.name())))?;
            let eps = r.positive("eps", 1.0 / (rounds.max(1) as f64).sqrt())?;
            let c = r.optional_positive("c")?;
            let cover = grid_cover(lo, hi, k, eps)?;
            hedge_wiring(cover.members, eps, meta.regret_bound, c)?
        }
        _ => return Ok(None),
    }))
}

fn finite_learner<P: Problem + 'static>(problem: &P, component: &Component, experts: Vec<P::Hypothesis>) -> Result<Option<WiredLearner<P>>> {
    let r = ParamReader::new("learner", component);
    Ok(Some(match component.name.as_str() {
        "ftl" => {
            r.allow(&[])?;
            WiredLearner::new(FollowTheLeader, LearnerKind::Ftl)
        }
        "hedge" => {
            r.allow(&["c"])?;
            let c = r.optional_positive("c")?;
            hedge_wiring(experts, 0.0, problem.metadata().regret_bound, c)?
        }
        "constant" => {
            r.allow(&["index"])?;
            let i = r.count("index", 0, experts.len() - 1)?;
            WiredLearner::new(Constant(experts[i].clone()), LearnerKind::Other)
        }
        _ => return Ok(None),
    }))
}

fn finite_members<P: Problem>(problem: &P) -> Vec<P::Hypothesis> {
    match problem.search_space() {
        SearchSpace::Finite(members) => members,
        _ => Vec::new(),
    }
}

const SCALAR_LEARNERS: &str = "ftl, ftrl, ftrl_abs, rslm, rslm_exact, constant, hedge";
const FINITE_LEARNERS: &str = "ftl, hedge, constant";

fn parse_f64(v: &Value) -> Option<f64> {
    v.as_f64()
}

fn parse_bit(v: &Value) -> Option<u8> {
    v.as_u64().filter(|&b| b <= 1).map(|b| b as u8)
}

impl Wire for Quadratic1d {
    fn learner(&self, component: &Component, rounds: usize) -> Result<WiredLearner<Self>> {
        scalar_learner(self, component, rounds)?.ok_or_else(|| unsupported(&component.name, self.name(), SCALAR_LEARNERS))
    }

    fn parse_point(v: &Value) -> Option<f64> {
        parse_f64(v)
    }
}

impl Wire for Absolute1d {
    fn learner(&self, component: &Component, rounds: usize) -> Result<WiredLearner<Self>> {
        scalar_learner(self, component, rounds)?.ok_or_else(|| unsupported(&component.name, self.name(), SCALAR_LEARNERS))
    }

    fn parse_point(v: &Value) -> Option<f64> {
        parse_f64(v)
    }
}

impl Wire for RandomizedBinary {
    fn learner(&self, component: &Component, rounds: usize) -> Result<WiredLearner<Self>> {
        let r = ParamReader::new("learner", component);
        match component.name.as_str() {
            "interval_rerm" => {
                r.allow(&["scale"])?;
                let scale = r.positive("scale", 1.0)?;
                Ok(WiredLearner::new(IntervalRerm::new(Weights::InverseSqrt { scale }), LearnerKind::Other))
            }
            "balanced_erm" => {
                r.allow(&[])?;
                Ok(WiredLearner::new(BalancedErm, LearnerKind::Other))
            }
            _ => scalar_learner(self, component, rounds)?
                .ok_or_else(|| unsupported(&component.name, self.name(), &format!("{SCALAR_LEARNERS}, interval_rerm, balanced_erm"))),
        }
    }

    fn special_adversary(&self, name: &str) -> Option<Box<dyn Adversary<Self>>> {
        match name {
            "rounded_pennies" => Some(Box::new(RoundedPennies)),
            "tracking" => Some(Box::new(TrackingAdversary)),
            _ => None,
        }
    }

    fn parse_point(v: &Value) -> Option<u8> {
        parse_bit(v)
    }
}

impl Wire for BinaryGame {
    fn learner(&self, component: &Component, _rounds: usize) -> Result<WiredLearner<Self>> {
        finite_learner(self, component, finite_members(self))?.ok_or_else(|| unsupported(&component.name, self.name(), FINITE_LEARNERS))
    }

    fn special_adversary(&self, name: &str) -> Option<Box<dyn Adversary<Self>>> {
        match name {
            "matching_pennies" => Some(Box::new(MatchingPennies)),
            "rounded_pennies" => Some(Box::new(RoundedPennies)),
            _ => None,
        }
    }

    fn parse_point(v: &Value) -> Option<u8> {
        parse_bit(v)
    }
}

impl Wire for FiniteExperts {
    fn learner(&self, component: &Component, _rounds: usize) -> Result<WiredLearner<Self>> {
        finite_learner(self, component, finite_members(self))?.ok_or_else(|| unsupported(&component.name, self.name(), FINITE_LEARNERS))
    }

    fn special_adversary(&self, name: &str) -> Option<Box<dyn Adversary<Self>>> {
        (name == "greedy").then(|| Box::new(GreedyExpertAdversary) as Box<dyn Adversary<Self>>)
    }

    /// A loss vector, one entry per expert.
    fn parse_point(v: &Value) -> Option<Vec<f64>> {
        v.as_array()?.iter().map(Value::as_f64).collect()
    }
}

impl Wire for RationalityGame {
    fn learner(&self, component: &Component, _rounds: usize) -> Result<WiredLearner<Self>> {
        finite_learner(self, component, RationalityGame::representatives())?
            .ok_or_else(|| unsupported(&component.name, self.name(), FINITE_LEARNERS))
    }

    /// `{"value": 1.5, "rational": true}`.
    fn parse_point(v: &Value) -> Option<TaggedReal> {
        let approx = v.get("value")?.as_f64()?;
        let kind = if v.get("rational")?.as_bool()? { NumberKind::Rational } else { NumberKind::Irrational };
        Some(TaggedReal { approx, kind })
    }
}

/// Threshold coordinates the harness can build from JSON and from grids.
pub(crate) trait GridCoordinate: Coordinate {
    /// `k / 2^bits`.
    fn grid(k: u64, bits: u32) -> Self;
    fn from_f64(t: f64) -> Option<Self>;
    fn parse(v: &Value) -> Option<Self>;
}

impl GridCoordinate for f64 {
    fn grid(k: u64, bits: u32) -> Self {
        k as f64 / 2f64.powi(bits as i32)
    }

    fn from_f64(t: f64) -> Option<Self> {
        Some(t)
    }

    fn parse(v: &Value) -> Option<Self> {
        v.as_f64()
    }
}

impl GridCoordinate for Dyadic {
    fn grid(k: u64, bits: u32) -> Self {
        Dyadic::new(k, bits)
    }

    /// Every finite double is a dyadic rational.
    fn from_f64(t: f64) -> Option<Self> {
        if !t.is_finite() || !(0.0..=1.0).contains(&t) {
            return None;
        }
        let mut scaled = t;
        let mut exp = 0u32;
        while scaled.fract() != 0.0 {
            scaled *= 2.0;
            exp += 1;
        }
        Some(Dyadic::new(scaled as u64, exp))
    }

    /// Either a plain number or `{"num": n, "exp": e}` for `n / 2^e`.
    fn parse(v: &Value) -> Option<Self> {
        if let Some(t) = v.as_f64() {
            return Self::from_f64(t);
        }
        let num = v.get("num")?.as_i64()?;
        let exp = u32::try_from(v.get("exp")?.as_u64()?).ok()?;
        Some(Dyadic::new(num, exp))
    }
}

impl<X: GridCoordinate> Wire for ThresholdClass<X> {
    fn learner(&self, component: &Component, _rounds: usize) -> Result<WiredLearner<Self>> {
        let r = ParamReader::new("learner", component);
        match component.name.as_str() {
            "ftl" => {
                r.allow(&[])?;
                Ok(WiredLearner::new(FollowTheLeader, LearnerKind::Ftl))
            }
            "constant" => {
                r.allow(&["t"])?;
                let t = X::from_f64(r.get("t").unwrap_or(0.0))
                    .filter(|t| self.contains_hypothesis(t))
                    .ok_or_else(|| config_err(r.field("t"), "must lie in [0, 1]"))?;
                Ok(WiredLearner::new(Constant(t), LearnerKind::Other))
            }
            "hedge" => {
                r.allow(&["bits", "c"])?;
                let bits = r.count("bits", 6, 20)? as u32;
                let c = r.optional_positive("c")?;
                let grid = (0..=1u64 << bits).map(|k| X::grid(k, bits)).collect();
                hedge_wiring(grid, 0.0, self.metadata().regret_bound, c)
            }
            _ => Err(unsupported(&component.name, self.name(), FINITE_LEARNERS)),
        }
    }

    fn special_adversary(&self, name: &str) -> Option<Box<dyn Adversary<Self>>> {
        (name == "bisection").then(|| Box::new(ThresholdAdversary::<X>::new()) as Box<dyn Adversary<Self>>)
    }

    /// `{"x": 0.5, "y": -1}`.
    fn parse_point(v: &Value) -> Option<LabeledPoint<X>> {
        let x = X::parse(v.get("x")?)?;
        let y = match v.get("y")?.as_i64()? {
            1 => Label::Positive,
            -1 => Label::Negative,
            _ => return None,
        };
        Some(LabeledPoint { x, y })
    }
}
