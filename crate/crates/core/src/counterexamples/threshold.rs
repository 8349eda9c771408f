use crate::error::{Error, Result};
use crate::learners::Play;
use crate::problems::{Coordinate, Label, LabeledPoint, ThresholdClass};
use crate::sources::Adversary;

/// Bisection state: the next query `x_i` and the points emitted so far.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdAdversaryState<X> {
    pub x: X,
    /// 1-based index of the next round.
    pub round: usize,
    pub history: Vec<LabeledPoint<X>>,
}

impl<X: Coordinate> ThresholdAdversaryState<X> {
    /// `x_1 = ½`.
    pub fn new() -> Self {
        Self {
            x: X::half(),
            round: 1,
            history: Vec::new(),
        }
    }
}

impl<X: Coordinate> Default for ThresholdAdversaryState<X> {
    fn default() -> Self {
        Self::new()
    }
}

/// The learner's prediction at `x_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPrediction {
    Label(Label),
    /// `P(h_i(x_i) = 1)`.
    Probability(f64),
}

/// Emits `z_i = (x_i, y_i)` with `y_i` opposing the prediction (for a
/// probability: `y_i = −1` iff `p_i ≥ ½`) and moves to
/// `x_{i+1} = x_i − y_i·2^{−(i+1)}`.
pub fn threshold_adversary_next<X: Coordinate>(
    state: ThresholdAdversaryState<X>,
    prediction: ThresholdPrediction,
) -> Result<(LabeledPoint<X>, ThresholdAdversaryState<X>)> {
    let i = state.round;
    if let Some(cap) = X::MAX_ROUNDS {
        if i > cap {
            return Err(Error::DyadicUnderflow { round: i, cap });
        }
    }
    let y = match prediction {
        ThresholdPrediction::Label(l) => l.flip(),
        ThresholdPrediction::Probability(p) if p >= 0.5 => Label::Negative,
        ThresholdPrediction::Probability(_) => Label::Positive,
    };
    let z = LabeledPoint { x: state.x.clone(), y };
    let next_x = state.x.add_pow2(-y.sign(), (i + 1) as u32);
    let mut history = state.history;
    history.push(z.clone());
    Ok((
        z,
        ThresholdAdversaryState {
            x: next_x,
            round: i + 1,
            history,
        },
    ))
}

/// Runs the bisection against any threshold learner: pure plays give a
/// label, mixed plays the probability of labelling `x_i` positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdAdversary<X> {
    state: Option<ThresholdAdversaryState<X>>,
}

impl<X: Coordinate> ThresholdAdversary<X> {
    pub fn new() -> Self {
        Self {
            state: Some(ThresholdAdversaryState::new()),
        }
    }

    pub fn state(&self) -> Option<&ThresholdAdversaryState<X>> {
        self.state.as_ref()
    }
}

impl<X: Coordinate> Default for ThresholdAdversary<X> {
    fn default() -> Self {
        Self::new()
    }
}

impl<X: Coordinate> Adversary<ThresholdClass<X>> for ThresholdAdversary<X> {
    fn name(&self) -> String {
        "threshold_bisection".into()
    }

    fn next_point(
        &mut self,
        problem: &ThresholdClass<X>,
        _round: usize,
        _history: &[LabeledPoint<X>],
        play: &Play<X>,
    ) -> Result<LabeledPoint<X>> {
        let state = self
            .state
            .take()
            .ok_or_else(|| Error::UnreachableState("adversary used after a failed round".into()))?;
        let prediction = match play {
            Play::Pure(t) => ThresholdPrediction::Label(problem.predict(t, &state.x)),
            Play::Mixed(_) => ThresholdPrediction::Probability(
                play.expectation(|t| if problem.predict(t, &state.x) == Label::Positive { 1.0 } else { 0.0 }),
            ),
        };
        let (z, next) = threshold_adversary_next(state, prediction)?;
        self.state = Some(next);
        Ok(z)
    }
}
