use crate::error::{invalid_param, Result};
use crate::learners::{Learner, Play, Session, Weights};
use crate::problems::RandomizedBinary;
use crate::sum::CompensatedSum;

/// Minimizer of `Σ f(p, z_i) + Σ_{i=0}^{m} λ_i |p − ½|` on the convexified
/// binary game, from `z̄` and `λ̄ = (1/m) Σ_{i=0}^{m} λ_i`: ½ on the closed
/// band `[(1 − λ̄)/2, (1 + λ̄)/2]`, else the vertex `z̄` points to.
pub fn interval_rerm_select(z_bar: f64, lambda_bar: f64) -> f64 {
    if z_bar > (1.0 + lambda_bar) / 2.0 {
        1.0
    } else if z_bar < (1.0 - lambda_bar) / 2.0 {
        0.0
    } else {
        0.5
    }
}

/// The `|p − ½|`-regularized learner, `O(1)` per round from running counts.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRerm {
    pub weights: Weights,
}

impl IntervalRerm {
    pub fn new(weights: Weights) -> Self {
        Self { weights }
    }

    /// `λ_i = 1/√max(1, i)`.
    pub fn inverse_sqrt() -> Self {
        Self::new(Weights::InverseSqrt { scale: 1.0 })
    }

    fn choose(&self, ones: usize, m: usize, lambda_total: f64) -> f64 {
        if m == 0 {
            return 0.5;
        }
        interval_rerm_select(ones as f64 / m as f64, lambda_total / m as f64)
    }

    fn lambda_total(&self, m: usize) -> f64 {
        let mut acc = CompensatedSum::new();
        for i in 0..=m {
            acc.add(self.weights.lambda(i));
        }
        acc.value()
    }
}

impl Learner<RandomizedBinary> for IntervalRerm {
    fn name(&self) -> String {
        "interval_rerm".into()
    }

    fn select(&self, _problem: &RandomizedBinary, data: &[u8]) -> Result<Play<f64>> {
        let ones = data.iter().filter(|&&z| z == 1).count();
        Ok(Play::Pure(self.choose(ones, data.len(), self.lambda_total(data.len()))))
    }

    fn start<'a>(&'a self, _problem: &'a RandomizedBinary) -> Box<dyn Session<RandomizedBinary> + 'a> {
        let mut lambda = CompensatedSum::new();
        lambda.add(self.weights.lambda(0));
        Box::new(IntervalSession {
            learner: self,
            ones: 0,
            m: 0,
            lambda,
        })
    }
}

struct IntervalSession<'a> {
    learner: &'a IntervalRerm,
    ones: usize,
    m: usize,
    lambda: CompensatedSum,
}

impl Session<RandomizedBinary> for IntervalSession<'_> {
    fn play(&mut self) -> Result<Play<f64>> {
        Ok(Play::Pure(self.learner.choose(self.ones, self.m, self.lambda.value())))
    }

    fn observe(&mut self, z: &u8) -> Result<()> {
        self.ones += usize::from(*z == 1);
        self.m += 1;
        self.lambda.add(self.learner.weights.lambda(self.m));
        Ok(())
    }
}

/// An ERM on the convexified game that plays ½ whenever the counts tie
/// (every `p` is then optimal). All-i-LOO stable, yet rounded pennies keeps
/// its average regret at ¼.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BalancedErm;

impl BalancedErm {
    fn choose(ones: usize, m: usize) -> f64 {
        match (2 * ones).cmp(&m) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Less => 0.0,
            std::cmp::Ordering::Equal => 0.5,
        }
    }
}

impl Learner<RandomizedBinary> for BalancedErm {
    fn name(&self) -> String {
        "balanced_erm".into()
    }

    fn select(&self, _problem: &RandomizedBinary, data: &[u8]) -> Result<Play<f64>> {
        let ones = data.iter().filter(|&&z| z == 1).count();
        Ok(Play::Pure(Self::choose(ones, data.len())))
    }

    fn start<'a>(&'a self, _problem: &'a RandomizedBinary) -> Box<dyn Session<RandomizedBinary> + 'a> {
        Box::new(BalancedSession { ones: 0, m: 0 })
    }
}

struct BalancedSession {
    ones: usize,
    m: usize,
}

impl Session<RandomizedBinary> for BalancedSession {
    fn play(&mut self) -> Result<Play<f64>> {
        Ok(Play::Pure(BalancedErm::choose(self.ones, self.m)))
    }

    fn observe(&mut self, z: &u8) -> Result<()> {
        self.ones += usize::from(*z == 1);
        self.m += 1;
        Ok(())
    }
}

/// A dataset of at least `min_len` bits on which deleting one point moves the
/// interval learner from 1 back into the band, so its uniform-LOO gap is at
/// least ½. Ones come first.
pub fn interval_witness(learner: &IntervalRerm, min_len: usize) -> Result<Vec<u8>> {
    for m in min_len.max(2)..min_len.max(2) + 10_000 {
        let total = learner.lambda_total(m);
        let Some(ones) = (0..=m).find(|&k| learner.choose(k, m, total) == 1.0) else {
            continue;
        };
        if learner.choose(ones - 1, m - 1, learner.lambda_total(m - 1)) != 1.0 {
            let mut s = vec![1u8; ones];
            s.resize(m, 0);
            return Ok(s);
        }
    }
    Err(invalid_param("weights", "no boundary-straddling dataset found; λ̄ may exceed 1"))
}
