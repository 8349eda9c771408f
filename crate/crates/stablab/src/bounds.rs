//! Empirical curves against theoretical rate tables.

use serde::Serialize;
use stablab_core::problems::LossMetadata;
use stablab_core::stability::{rate_hedge, rate_loo_bounded_reg, rate_loo_strongly_convex_loss, rate_regret_rerm, RateTable};
use stablab_core::{Error, RegretLedger};

use crate::error::{HarnessError, Result};
use crate::wiring::LearnerKind;

/// Default additive tolerance for identities; inequalities use 0.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckResult {
    pub bound: String,
    /// `(m, empirical, theoretical)` per checked point.
    pub points: Vec<(usize, f64, f64)>,
    /// Largest `empirical − theoretical`.
    pub max_violation: f64,
    /// The `m` attaining `max_violation`.
    pub worst_m: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares `empirical[m − 1]` with `table.at(m)` for every `m`.
pub fn check_bounds(empirical: &[f64], table: &RateTable, tolerance: f64) -> Result<BoundCheckResult> {
    if empirical.len() != table.len() {
        return Err(Error::LengthMismatch {
            expected: table.len(),
            actual: empirical.len(),
        }
        .into());
    }
    let at: Vec<(usize, f64)> = empirical.iter().enumerate().map(|(i, &v)| (i + 1, v)).collect();
    check_at(&at, table, tolerance)
}

/// Compares `(m, value)` pairs with `table.at(m)`.
pub fn check_at(empirical: &[(usize, f64)], table: &RateTable, tolerance: f64) -> Result<BoundCheckResult> {
    if empirical.is_empty() {
        return Err(Error::EmptyDataset.into());
    }
    let mut points = Vec::with_capacity(empirical.len());
    let (mut max_violation, mut worst_m) = (f64::NEG_INFINITY, 0);
    for &(m, v) in empirical {
        if m == 0 || m > table.len() {
            return Err(Error::LengthMismatch {
                expected: table.len(),
                actual: m,
            }
            .into());
        }
        let theory = table.at(m);
        let violation = v - theory;
        // NaN counts as a violation.
        if violation > max_violation || violation.is_nan() && !max_violation.is_nan() {
            max_violation = violation;
            worst_m = m;
        }
        points.push((m, v, theory));
    }
    Ok(BoundCheckResult {
        bound: table.name.clone(),
        points,
        max_violation,
        worst_m,
        tolerance,
        pass: max_violation <= tolerance,
    })
}

/// Average regret `R_t / t` at every round against `table`.
pub fn check_ledger(ledger: &RegretLedger, table: &RateTable, tolerance: f64) -> Result<BoundCheckResult> {
    let avg: Vec<f64> = (1..=ledger.rounds()).map(|t| ledger.regret_at(t) / t as f64).collect();
    check_bounds(&avg, table, tolerance)
}

fn not_applicable(bound: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::BoundNotApplicable {
        bound: bound.to_string(),
        reason: reason.into(),
    }
}

fn strong_convexity(bound: &str, meta: &LossMetadata) -> Result<(f64, f64)> {
    match (meta.lipschitz, meta.strong_convexity) {
        (Some(l), Some(nu)) if nu > 0.0 => Ok((l, nu)),
        _ => Err(not_applicable(bound, "the loss is not Lipschitz and strongly convex")),
    }
}

fn lipschitz(bound: &str, meta: &LossMetadata) -> Result<f64> {
    meta.lipschitz
        .ok_or_else(|| not_applicable(bound, "the loss has no Lipschitz constant"))
}

fn require(bound: &str, ok: bool, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(not_applicable(bound, reason))
    }
}

type Range = Box<dyn Fn(usize) -> f64>;

/// The LOO table for an FTRL learner, with its regularizer ranges `ρ_i`.
fn ftrl_loo(bound: &str, meta: &LossMetadata, kind: &LearnerKind, max_m: usize) -> Result<(RateTable, Range)> {
    let LearnerKind::Ftrl { schedule, lo, hi } = kind else {
        return Err(not_applicable(bound, "the learner is not FTRL"));
    };
    require(bound, schedule.strong_convexity(0) > 0.0, "the regularizer is not strongly convex")?;
    let l = lipschitz(bound, meta)?;
    let (s, lo, hi) = (schedule.clone(), *lo, *hi);
    let rho = move |i: usize| s.rho(i, lo, hi);
    let s = schedule.clone();
    let table = rate_loo_bounded_reg(l, &rho, &move |i| s.strong_convexity(i), max_m)?;
    Ok((table, Box::new(rho)))
}

/// Average-regret table `bound` promises for this learner on this loss.
pub(crate) fn regret_table(bound: &str, meta: &LossMetadata, kind: &LearnerKind, max_m: usize) -> Result<RateTable> {
    match bound {
        "hedge" => {
            let &LearnerKind::Hedge {
                experts,
                eps,
                theorem_schedule,
            } = kind
            else {
                return Err(not_applicable(bound, "the learner is not Hedge"));
            };
            require(bound, theorem_schedule, "only the theorem's schedule is covered")?;
            let mut table = match experts {
                1 => RateTable {
                    name: "hedge_regret".into(),
                    values: vec![0.0; max_m],
                    params: vec![("B".into(), meta.regret_bound), ("d".into(), 1.0)],
                },
                d => rate_hedge(meta.regret_bound, d, max_m)?.regret,
            };
            if eps > 0.0 {
                table.values.iter_mut().for_each(|v| *v += eps);
                table.name = "cover_regret".into();
                table.params.push(("eps".into(), eps));
            }
            Ok(table)
        }
        "harmonic" => {
            require(bound, *kind == LearnerKind::Ftl, "the learner is not FTL")?;
            let (l, nu) = strong_convexity(bound, meta)?;
            let loo = rate_loo_strongly_convex_loss(l, nu, max_m)?;
            Ok(rate_regret_rerm(&loo, &|_| 0.0, max_m)?)
        }
        "ftrl" => {
            let (loo, rho) = ftrl_loo(bound, meta, kind, max_m)?;
            Ok(rate_regret_rerm(&loo, &*rho, max_m)?)
        }
        other => Err(not_applicable(other, "unknown bound")),
    }
}

/// Uniform-LOO stability table `bound` promises for this learner.
pub(crate) fn loo_table(bound: &str, meta: &LossMetadata, kind: &LearnerKind, max_m: usize) -> Result<RateTable> {
    match bound {
        "hedge" => {
            let &LearnerKind::Hedge {
                experts, theorem_schedule, ..
            } = kind
            else {
                return Err(not_applicable(bound, "the learner is not Hedge"));
            };
            require(bound, theorem_schedule && experts >= 2, "needs the theorem's schedule over at least two experts")?;
            Ok(rate_hedge(meta.regret_bound, experts, max_m)?.loo)
        }
        "harmonic" => {
            require(bound, *kind == LearnerKind::Ftl, "the learner is not FTL")?;
            let (l, nu) = strong_convexity(bound, meta)?;
            Ok(rate_loo_strongly_convex_loss(l, nu, max_m)?)
        }
        "ftrl" => Ok(ftrl_loo(bound, meta, kind, max_m)?.0),
        other => Err(not_applicable(other, "unknown bound")),
    }
}
