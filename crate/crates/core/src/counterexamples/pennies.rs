use crate::error::{Error, Result};
use crate::learners::Play;
use crate::problems::{BinaryGame, RandomizedBinary};
use crate::sources::Adversary;

/// `z = 1 − h` for a bit `h`.
pub fn matching_pennies_next(h: u8) -> Result<u8> {
    match h {
        0 => Ok(1),
        1 => Ok(0),
        _ => Err(Error::InvalidHypothesis(format!("matching pennies needs a bit, got {h}"))),
    }
}

/// `z = round(1 − p)`, rounding 0.5 up to 1.
pub fn rounded_pennies_next(p: f64) -> u8 {
    u8::from(1.0 - p >= 0.5)
}

/// Against the `|p − ½|`-regularized learner: answer ½ with 1 and 1 with 0.
/// The learner never reaches 0 under this adversary.
pub fn tracking_adversary_next(p: f64) -> Result<u8> {
    if p == 0.5 {
        Ok(1)
    } else if p == 1.0 {
        Ok(0)
    } else if p == 0.0 {
        Err(Error::UnreachableState("the tracked learner played p = 0".into()))
    } else {
        Err(Error::InvalidHypothesis(format!("tracking adversary expects p ∈ {{0, ½, 1}}, got {p}")))
    }
}

/// Plays `1 − h_t` against a deterministic learner on the binary game.
#[derive(Debug, Clone, Copy, Default)]
pub struct MatchingPennies;

impl Adversary<BinaryGame> for MatchingPennies {
    fn name(&self) -> String {
        "matching_pennies".into()
    }

    fn next_point(&mut self, _problem: &BinaryGame, _round: usize, _history: &[u8], play: &Play<u8>) -> Result<u8> {
        match play {
            Play::Pure(h) => matching_pennies_next(*h),
            Play::Mixed(_) => Err(Error::IncompatiblePlay(
                "matching pennies needs a deterministic learner".into(),
            )),
        }
    }
}

/// Mean probability of playing 1.
fn probability(play: &Play<f64>) -> f64 {
    play.expectation(|p| *p)
}

/// Plays `round(1 − p_t)` on the convexified game.
#[derive(Debug, Clone, Copy, Default)]
pub struct RoundedPennies;

impl Adversary<RandomizedBinary> for RoundedPennies {
    fn name(&self) -> String {
        "rounded_pennies".into()
    }

    fn next_point(&mut self, _problem: &RandomizedBinary, _round: usize, _history: &[u8], play: &Play<f64>) -> Result<u8> {
        Ok(rounded_pennies_next(probability(play)))
    }
}

/// Hedge and other mixed learners play a probability on the binary game too.
impl Adversary<BinaryGame> for RoundedPennies {
    fn name(&self) -> String {
        "rounded_pennies".into()
    }

    fn next_point(&mut self, _problem: &BinaryGame, _round: usize, _history: &[u8], play: &Play<u8>) -> Result<u8> {
        Ok(rounded_pennies_next(play.expectation(|h| f64::from(*h))))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrackingAdversary;

impl Adversary<RandomizedBinary> for TrackingAdversary {
    fn name(&self) -> String {
        "tracking".into()
    }

    fn next_point(&mut self, _problem: &RandomizedBinary, _round: usize, _history: &[u8], play: &Play<f64>) -> Result<u8> {
        tracking_adversary_next(probability(play))
    }
}
