//! Empirical stability gaps and the closed-form rates they are compared to.

mod rates;

pub use rates::{
    rate_hedge, rate_loo_bounded_reg, rate_loo_convex_reg, rate_loo_strongly_convex_loss, rate_regret_always_aerm,
    rate_regret_rerm, AermCase, HedgeRates, RateTable,
};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Binomial, Discrete};

use crate::dataset;
use crate::error::{invalid_param, Error, Result};
use crate::learners::{Learner, Play};
use crate::problems::Problem;
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityKind {
    Online,
    UniformLoo,
    AllILoo,
    UniformRo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub kind: StabilityKind,
    /// Per-index gaps (per-index means for Monte-Carlo kinds).
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    /// Monte-Carlo standard error of each mean; empty for exact kinds.
    pub std_errors: Vec<f64>,
    pub sample_count: usize,
}

impl StabilityReport {
    fn exact(kind: StabilityKind, gaps: Vec<f64>) -> Self {
        let max_gap = gaps.iter().copied().fold(0.0, f64::max);
        Self {
            kind,
            gaps,
            max_gap,
            std_errors: Vec::new(),
            sample_count: 1,
        }
    }

    /// Mean gap over indices.
    pub fn mean_gap(&self) -> f64 {
        if self.gaps.is_empty() {
            return 0.0;
        }
        crate::sum::sum(self.gaps.iter().copied()) / self.gaps.len() as f64
    }
}

fn gap<P: Problem>(problem: &P, a: &Play<P::Hypothesis>, b: &Play<P::Hypothesis>, z: &P::Point) -> f64 {
    (a.expected_loss(problem, z) - b.expected_loss(problem, z)).abs()
}

/// `|f(A(S^{\m}), z_m) − f(A(S), z_m)|`.
pub fn online_stability_gap<P, L>(learner: &L, problem: &P, data: &[P::Point]) -> Result<f64>
where
    P: Problem,
    L: Learner<P> + ?Sized,
{
    let Some((last, prefix)) = data.split_last() else {
        return Err(Error::EmptyDataset);
    };
    let without = learner.select(problem, prefix)?;
    let full = learner.select(problem, data)?;
    Ok(gap(problem, &without, &full, last))
}

/// `gaps[i] = |f(A(S^{\i}), z_i) − f(A(S), z_i)|` for every `i`.
pub fn uniform_loo_gap<P, L>(learner: &L, problem: &P, data: &[P::Point]) -> Result<StabilityReport>
where
    P: Problem,
    L: Learner<P> + ?Sized,
{
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let full = learner.select(problem, data)?;
    let loo = learner.leave_one_out(problem, data)?;
    let gaps = data.iter().zip(&loo).map(|(z, h)| gap(problem, h, &full, z)).collect();
    Ok(StabilityReport::exact(StabilityKind::UniformLoo, gaps))
}

/// `(1/m) Σ_i |f(A(S^{(i)}), z′) − f(A(S), z′)|`, where `S^{(i)}` swaps in
/// `replacements[i]`.
pub fn uniform_ro_gap<P, L>(learner: &L, problem: &P, data: &[P::Point], replacements: &[P::Point], probe: &P::Point) -> Result<f64>
where
    P: Problem,
    L: Learner<P> + ?Sized,
{
    if replacements.len() != data.len() {
        return Err(Error::LengthMismatch {
            expected: data.len(),
            actual: replacements.len(),
        });
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let full = learner.select(problem, data)?;
    let mut acc = CompensatedSum::new();
    for (i, r) in replacements.iter().enumerate() {
        let mut swapped = data.to_vec();
        swapped[i] = r.clone();
        acc.add(gap(problem, &learner.select(problem, &swapped)?, &full, probe));
    }
    Ok(acc.value() / data.len() as f64)
}

/// Samples per parallel work unit. Fixed so the reduction order, and hence
/// every bit of the result, does not depend on the thread count.
const CHUNK: usize = 32;

/// Monte-Carlo estimate of `E_S |f(A(S^{\i}), z_i) − f(A(S), z_i)|` for each
/// `i`, with `S` drawn i.i.d. from `sampler`. Sample `s` uses ChaCha8 stream
/// `s` of `seed`.
pub fn all_i_loo_estimate<P, L, F>(learner: &L, problem: &P, sampler: F, m: usize, n_samples: usize, seed: u64) -> Result<StabilityReport>
where
    P: Problem,
    L: Learner<P> + ?Sized,
    F: Fn(&mut dyn RngCore) -> P::Point + Sync,
{
    if n_samples == 0 {
        return Err(invalid_param("n_samples", "need at least one sample"));
    }
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    let chunks: Vec<(Vec<CompensatedSum>, Vec<CompensatedSum>)> = (0..n_samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| -> Result<_> {
            let mut sums = vec![CompensatedSum::new(); m];
            let mut squares = vec![CompensatedSum::new(); m];
            for s in c * CHUNK..((c + 1) * CHUNK).min(n_samples) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(s as u64);
                let data: Vec<P::Point> = (0..m).map(|_| sampler(&mut rng)).collect();
                let report = uniform_loo_gap(learner, problem, &data)?;
                for (i, g) in report.gaps.into_iter().enumerate() {
                    sums[i].add(g);
                    squares[i].add(g * g);
                }
            }
            Ok((sums, squares))
        })
        .collect::<Result<_>>()?;
    let mut sums = vec![CompensatedSum::new(); m];
    let mut squares = vec![CompensatedSum::new(); m];
    for (cs, cq) in &chunks {
        for i in 0..m {
            sums[i].add(cs[i].value());
            squares[i].add(cq[i].value());
        }
    }
    let n = n_samples as f64;
    let gaps: Vec<f64> = sums.iter().map(|s| s.value() / n).collect();
    let std_errors = gaps
        .iter()
        .zip(&squares)
        .map(|(mean, sq)| {
            if n_samples < 2 {
                return 0.0;
            }
            let var = ((sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        })
        .collect();
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    Ok(StabilityReport {
        kind: StabilityKind::AllILoo,
        gaps,
        max_gap,
        std_errors,
        sample_count: n_samples,
    })
}

/// Exact per-index all-i-LOO gap of the binary-game ERM (majority, ties to
/// 0) when each bit is 1 with probability `p`. The gap is 1 exactly when
/// deleting `z_i` changes the majority.
pub fn binary_erm_all_i_loo_exact(m: usize, p: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid_param("p", format!("must lie in [0, 1], got {p}")));
    }
    let majority = |ones: usize, len: usize| 2 * ones > len;
    let dist = Binomial::new(p, m as u64).map_err(|e| invalid_param("p", e.to_string()))?;
    let mut acc = CompensatedSum::new();
    for k in 0..=m {
        let full = majority(k, m);
        // z_i is one of the k ones with probability k/m.
        let flip_one = k > 0 && majority(k - 1, m - 1) != full;
        let flip_zero = k < m && majority(k, m - 1) != full;
        let mut w = 0.0;
        if flip_one {
            w += k as f64 / m as f64;
        }
        if flip_zero {
            w += (m - k) as f64 / m as f64;
        }
        if w > 0.0 {
            acc.add(w * dist.pmf(k as u64));
        }
    }
    Ok(acc.value())
}

/// `A(S^{\i})` for every `i` by full retraining, ignoring any faster
/// override the learner ships.
pub fn leave_one_out_plays<P, L>(learner: &L, problem: &P, data: &[P::Point]) -> Result<Vec<Play<P::Hypothesis>>>
where
    P: Problem,
    L: Learner<P> + ?Sized,
{
    (0..data.len())
        .map(|i| learner.select(problem, &dataset::without(data, i)))
        .collect()
}

#[cfg(test)]
mod tests;
