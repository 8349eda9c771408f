use std::fmt::Debug;
use std::marker::PhantomData;

use num_bigint::BigInt;
use rand::{Rng, RngCore};

use super::{Dyadic, LossMetadata, Problem};

/// Scalar type for threshold positions on `[0, 1]`.
pub trait Coordinate: Clone + Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    /// Rounds of dyadic bisection the type can represent without collapsing
    /// distinct points, or `None` if unbounded.
    const MAX_ROUNDS: Option<usize>;

    fn zero() -> Self;
    fn one() -> Self;
    fn half() -> Self;
    fn midpoint(&self, other: &Self) -> Self;
    /// `self + sign · 2^{−k}`.
    fn add_pow2(&self, sign: i8, k: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn sample_unit(rng: &mut dyn RngCore) -> Self;
}

impl Coordinate for f64 {
    const MAX_ROUNDS: Option<usize> = Some(48);

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn half() -> Self {
        0.5
    }
    fn midpoint(&self, other: &Self) -> Self {
        0.5 * (self + other)
    }
    fn add_pow2(&self, sign: i8, k: u32) -> Self {
        self + f64::from(sign) * 2f64.powi(-(k as i32))
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sample_unit(rng: &mut dyn RngCore) -> Self {
        rng.random::<f64>()
    }
}

impl Coordinate for Dyadic {
    const MAX_ROUNDS: Option<usize> = None;

    fn zero() -> Self {
        Dyadic::zero()
    }
    fn one() -> Self {
        Dyadic::one()
    }
    fn half() -> Self {
        Dyadic::half()
    }
    fn midpoint(&self, other: &Self) -> Self {
        Dyadic::midpoint(self, other)
    }
    fn add_pow2(&self, sign: i8, k: u32) -> Self {
        Dyadic::add_pow2(self, sign, k)
    }
    fn to_f64(&self) -> f64 {
        Dyadic::to_f64(self)
    }
    fn sample_unit(rng: &mut dyn RngCore) -> Self {
        Dyadic::new(BigInt::from(rng.random::<u64>() >> 11), 53)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    pub fn from_sign(s: i8) -> Self {
        if s >= 0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint<X> {
    pub x: X,
    pub y: Label,
}

/// Thresholds `h_t(x) = 2·I(x ≥ t) − 1` on `[0, 1]` with loss
/// `(1 − h_t(x)·y)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdClass<X> {
    _coordinate: PhantomData<X>,
}

impl<X> Default for ThresholdClass<X> {
    fn default() -> Self {
        Self {
            _coordinate: PhantomData,
        }
    }
}

impl<X: Coordinate> ThresholdClass<X> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn predict(&self, t: &X, x: &X) -> Label {
        if x >= t {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    /// Mistake count of `t` on `points`.
    pub fn mistakes(&self, t: &X, points: &[LabeledPoint<X>]) -> usize {
        points.iter().filter(|p| self.predict(t, &p.x) != p.y).count()
    }
}

impl<X: Coordinate> Problem for ThresholdClass<X> {
    type Hypothesis = X;
    type Point = LabeledPoint<X>;

    fn name(&self) -> &'static str {
        "threshold_class"
    }

    fn loss(&self, t: &X, z: &LabeledPoint<X>) -> f64 {
        if self.predict(t, &z.x) == z.y {
            0.0
        } else {
            1.0
        }
    }

    fn metadata(&self) -> LossMetadata {
        LossMetadata {
            regret_bound: 1.0,
            lipschitz: None,
            strong_convexity: None,
            diameter: Some(1.0),
            dimension: 1,
        }
    }

    fn default_hypothesis(&self) -> X {
        X::zero()
    }

    fn contains_point(&self, z: &LabeledPoint<X>) -> bool {
        z.x >= X::zero() && z.x <= X::one()
    }

    fn contains_hypothesis(&self, t: &X) -> bool {
        *t >= X::zero() && *t <= X::one()
    }

    /// Mistake scan over the cells cut out by the sorted sample points, with
    /// virtual end points 0 and 1. Each cell is represented by its midpoint
    /// and the leftmost optimal cell wins.
    fn exact_erm(&self, points: &[LabeledPoint<X>]) -> Option<X> {
        if points.is_empty() {
            return Some(self.default_hypothesis());
        }
        let mut sorted: Vec<&LabeledPoint<X>> = points.iter().collect();
        sorted.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("comparable coordinates"));

        // Start with t at or below every point: everything is called positive.
        let mut mistakes = sorted.iter().filter(|p| p.y == Label::Negative).count();
        let mut best_mistakes = mistakes;
        let mut best_cell = (X::zero(), sorted[0].x.clone());
        let mut i = 0;
        while i < sorted.len() {
            let x = &sorted[i].x;
            // Move every point at `x` to the negative side.
            while i < sorted.len() && sorted[i].x == *x {
                match sorted[i].y {
                    Label::Negative => mistakes -= 1,
                    Label::Positive => mistakes += 1,
                }
                i += 1;
            }
            let right = if i < sorted.len() { sorted[i].x.clone() } else { X::one() };
            if *x < right && mistakes < best_mistakes {
                best_mistakes = mistakes;
                best_cell = (x.clone(), right);
            }
        }
        Some(best_cell.0.midpoint(&best_cell.1))
    }

    fn sample_hypothesis(&self, rng: &mut dyn RngCore) -> X {
        X::sample_unit(rng)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> LabeledPoint<X> {
        let x = X::sample_unit(rng);
        let y = if rng.random::<bool>() { Label::Positive } else { Label::Negative };
        LabeledPoint { x, y }
    }
}
