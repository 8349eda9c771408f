//! Sequences and learners that separate the stability notions: matching
//! pennies against deterministic learners, the `|p − ½|`-regularized learner
//! on the convexified binary game, and the bisection adversary on thresholds.

mod interval;
mod pennies;
mod threshold;

pub use interval::{interval_rerm_select, interval_witness, BalancedErm, IntervalRerm};
pub use pennies::{
    matching_pennies_next, rounded_pennies_next, tracking_adversary_next, MatchingPennies, RoundedPennies, TrackingAdversary,
};
pub use threshold::{threshold_adversary_next, ThresholdAdversary, ThresholdAdversaryState, ThresholdPrediction};
