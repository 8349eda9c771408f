//! ε-covers of a hypothesis class and Hedge run over a cover.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid_param, Error, Result};
use crate::learners::{default_lambda_schedule, Hedge, LambdaSchedule};
use crate::problems::{Problem, RationalityGame, SearchSpace, TaggedReal};
use crate::stability::rate_hedge;

/// Largest expert set Hedge-over-cover accepts by default.
pub const DEFAULT_EXPERT_CAP: usize = 1_000_000;

/// Finite hypotheses whose losses approximate every hypothesis's loss
/// within `epsilon`, uniformly over the instance space.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover<H> {
    pub members: Vec<H>,
    pub epsilon: f64,
}

impl<H> Cover<H> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `ε_m` as a function of the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsSchedule {
    /// `ε_m = 1/√m`
    InverseSqrt,
    /// `ε_m = 1/m`
    Inverse,
}

impl EpsSchedule {
    pub fn eps(self, m: usize) -> f64 {
        let m = m.max(1) as f64;
        match self {
            EpsSchedule::InverseSqrt => 1.0 / m.sqrt(),
            EpsSchedule::Inverse => 1.0 / m,
        }
    }
}

/// `ceil(x)`, ignoring relative rounding noise below 1e-12 so that exact
/// ratios such as `2 / 0.02` do not gain a cell.
fn cells(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        r.max(1.0) as usize
    } else {
        x.ceil().max(1.0) as usize
    }
}

fn check_grid(lo: f64, hi: f64, k: f64, eps: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(invalid_param("interval", format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(invalid_param("K", format!("must be positive, got {k}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid_param("eps", format!("must be positive, got {eps}")));
    }
    Ok(())
}

/// Centers of the cells of a grid with spacing `2ε/K` on `[lo, hi]`; the
/// last cell is clipped at `hi`. Every point lies within `ε/K` of a member.
fn axis(lo: f64, hi: f64, k: f64, eps: f64) -> Vec<f64> {
    let width = 2.0 * eps / k;
    let n = cells((hi - lo) / width);
    (0..n)
        .map(|j| {
            let a = lo + j as f64 * width;
            let b = (lo + (j + 1) as f64 * width).min(hi);
            0.5 * (a + b)
        })
        .collect()
}

/// Grid ε-cover of `[lo, hi]` for a loss that is `K`-Lipschitz in `h`.
pub fn grid_cover(lo: f64, hi: f64, k: f64, eps: f64) -> Result<Cover<f64>> {
    check_grid(lo, hi, k, eps)?;
    Ok(Cover {
        members: axis(lo, hi, k, eps),
        epsilon: eps,
    })
}

/// Grid ε-cover of a box of dimension at most 3, for a loss that is
/// `K`-Lipschitz in the sup norm.
pub fn grid_cover_box(bounds: &[(f64, f64)], k: f64, eps: f64, cap: usize) -> Result<Cover<Vec<f64>>> {
    if bounds.is_empty() || bounds.len() > 3 {
        return Err(invalid_param("dimension", format!("grid covers support 1 to 3 dimensions, got {}", bounds.len())));
    }
    let mut axes = Vec::with_capacity(bounds.len());
    for &(lo, hi) in bounds {
        check_grid(lo, hi, k, eps)?;
        axes.push(axis(lo, hi, k, eps));
    }
    let size = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len())).unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::CoverTooLarge { size, cap });
    }
    let mut members = vec![Vec::new()];
    for a in &axes {
        members = members
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                a.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    Ok(Cover { members, epsilon: eps })
}

/// `{1, √2}`: one rational and one irrational member, an exact (ε = 0)
/// cover for the rationality game.
pub fn rationality_cover() -> Cover<TaggedReal> {
    Cover {
        members: RationalityGame::representatives(),
        epsilon: 0.0,
    }
}

/// The whole hypothesis space of a finite problem, as a 0-cover.
pub fn finite_cover<P: Problem>(problem: &P) -> Result<Cover<P::Hypothesis>> {
    match problem.search_space() {
        SearchSpace::Finite(members) => Ok(Cover { members, epsilon: 0.0 }),
        _ => Err(invalid_param("problem", format!("`{}` has no finite hypothesis space", problem.name()))),
    }
}

/// Outcome of probing a cover.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport<H, Z> {
    pub passed: bool,
    pub probes: usize,
    /// Largest `min_member |f(member, z) − f(h′, z)|` over the probes.
    pub worst_gap: f64,
    /// `ε − worst_gap`; negative on failure.
    pub worst_slack: f64,
    /// The probe attaining `worst_gap` when it exceeds ε.
    pub witness: Option<(H, Z)>,
}

fn min_gap<P: Problem>(problem: &P, members: &[P::Hypothesis], h: &P::Hypothesis, z: &P::Point) -> f64 {
    let target = problem.loss(h, z);
    members
        .iter()
        .map(|c| (problem.loss(c, z) - target).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Checks the cover on explicit `(h′, z)` probes.
pub fn verify_cover_on<P: Problem>(
    cover: &Cover<P::Hypothesis>,
    problem: &P,
    probes: &[(P::Hypothesis, P::Point)],
) -> Result<CoverReport<P::Hypothesis, P::Point>> {
    if cover.is_empty() {
        return Err(Error::EmptyExpertSet);
    }
    let mut worst = (0.0, None);
    for (h, z) in probes {
        let g = min_gap(problem, &cover.members, h, z);
        if g > worst.0 || worst.1.is_none() {
            worst = (g, Some((h.clone(), z.clone())));
        }
    }
    Ok(report(cover.epsilon, probes.len(), worst))
}

fn report<H, Z>(epsilon: f64, probes: usize, worst: Worst<H, Z>) -> CoverReport<H, Z> {
    let (worst_gap, probe) = worst;
    // Losses at cell edges sit exactly ε away; allow for rounding.
    let passed = worst_gap <= epsilon + 1e-12 * epsilon.abs().max(1.0);
    CoverReport {
        passed,
        probes,
        worst_gap,
        worst_slack: epsilon - worst_gap,
        witness: if passed { None } else { probe },
    }
}

const PROBE_CHUNK: usize = 256;

type Worst<H, Z> = (f64, Option<(H, Z)>);

/// Checks the cover on `n_probes` random `(h′, z)` pairs from the problem's
/// samplers. Chunk `c` draws from ChaCha8 stream `c` of `seed`.
pub fn verify_cover<P: Problem>(
    cover: &Cover<P::Hypothesis>,
    problem: &P,
    n_probes: usize,
    seed: u64,
) -> Result<CoverReport<P::Hypothesis, P::Point>> {
    if cover.is_empty() {
        return Err(Error::EmptyExpertSet);
    }
    let chunks: Vec<Worst<P::Hypothesis, P::Point>> = (0..n_probes.div_ceil(PROBE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut worst = (0.0, None);
            for _ in c * PROBE_CHUNK..((c + 1) * PROBE_CHUNK).min(n_probes) {
                let h = problem.sample_hypothesis(&mut rng);
                let z = problem.sample_point(&mut rng);
                let g = min_gap(problem, &cover.members, &h, &z);
                if g > worst.0 || worst.1.is_none() {
                    worst = (g, Some((h, z)));
                }
            }
            worst
        })
        .collect();
    let mut worst = (0.0, None);
    for (g, probe) in chunks {
        if g > worst.0 || worst.1.is_none() {
            worst = (g, probe);
        }
    }
    Ok(report(cover.epsilon, n_probes, worst))
}

/// Hedge with the default schedule over the members of `cover`. A single
/// member needs no weighting, so it gets a constant schedule.
pub fn hedge_over_cover<H: Clone>(cover: &Cover<H>, bound: f64, cap: usize) -> Result<Hedge<H>> {
    if cover.len() > cap {
        return Err(Error::CoverTooLarge { size: cover.len(), cap });
    }
    let schedule = match cover.len() {
        0 => return Err(Error::EmptyExpertSet),
        1 => LambdaSchedule::Constant(bound),
        d => default_lambda_schedule(bound, d)?,
    };
    Hedge::new(cover.members.clone(), schedule)
}

/// Average-regret bound of Hedge over a cover of size `d` at round `t`:
/// the Hedge rate for `d` experts plus `eps`.
pub fn cover_regret_bound(bound: f64, d: usize, eps: f64, t: usize) -> Result<f64> {
    let hedge = match d {
        0 => return Err(Error::EmptyExpertSet),
        1 => 0.0,
        _ => rate_hedge(bound, d, t)?.regret.at(t),
    };
    Ok(hedge + eps)
}
