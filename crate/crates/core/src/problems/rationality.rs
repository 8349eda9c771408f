use rand::{Rng, RngCore};

use super::{FiniteTracker, HindsightTracker, LossMetadata, Problem, SearchSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NumberKind {
    Rational,
    Irrational,
}

/// A real number carried with its rationality, since `f64` cannot tell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedReal {
    pub approx: f64,
    pub kind: NumberKind,
}

impl TaggedReal {
    pub fn rational(approx: f64) -> Self {
        Self {
            approx,
            kind: NumberKind::Rational,
        }
    }

    pub fn irrational(approx: f64) -> Self {
        Self {
            approx,
            kind: NumberKind::Irrational,
        }
    }
}

/// `ℋ = 𝒵 = ℝ`, with loss 0 when `h` and `z` are both rational or both
/// irrational and 1 otherwise. Uncountable, yet covered exactly by two points.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RationalityGame;

impl RationalityGame {
    /// One representative per class: `1` and `√2`.
    pub fn representatives() -> Vec<TaggedReal> {
        vec![TaggedReal::rational(1.0), TaggedReal::irrational(std::f64::consts::SQRT_2)]
    }
}

impl Problem for RationalityGame {
    type Hypothesis = TaggedReal;
    type Point = TaggedReal;

    fn name(&self) -> &'static str {
        "rationality_game"
    }

    fn loss(&self, h: &TaggedReal, z: &TaggedReal) -> f64 {
        if h.kind == z.kind {
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
            diameter: None,
            dimension: 1,
        }
    }

    fn default_hypothesis(&self) -> TaggedReal {
        Self::representatives()[0]
    }

    fn contains_point(&self, z: &TaggedReal) -> bool {
        z.approx.is_finite()
    }

    fn contains_hypothesis(&self, h: &TaggedReal) -> bool {
        h.approx.is_finite()
    }

    /// Representative of the majority class, rational on ties.
    fn exact_erm(&self, points: &[TaggedReal]) -> Option<TaggedReal> {
        let irrational = points.iter().filter(|z| z.kind == NumberKind::Irrational).count();
        let reps = Self::representatives();
        Some(if 2 * irrational > points.len() { reps[1] } else { reps[0] })
    }

    fn search_space(&self) -> SearchSpace<TaggedReal> {
        SearchSpace::Finite(Self::representatives())
    }

    fn sample_hypothesis(&self, rng: &mut dyn RngCore) -> TaggedReal {
        self.sample_point(rng)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> TaggedReal {
        let n: u32 = rng.random_range(1..=1000);
        if rng.random::<bool>() {
            TaggedReal::rational(f64::from(n) / 7.0)
        } else {
            // √n is irrational unless n is a perfect square; shift by √2 to be safe.
            let root = f64::from(n).sqrt();
            if root.fract() == 0.0 {
                TaggedReal::irrational(root + std::f64::consts::SQRT_2)
            } else {
                TaggedReal::irrational(root)
            }
        }
    }

    fn hindsight_tracker(&self) -> Box<dyn HindsightTracker<Self> + '_> {
        Box::new(FiniteTracker::new(self, Self::representatives()))
    }
}
