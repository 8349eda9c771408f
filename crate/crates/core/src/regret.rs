//! Regret accounting for online runs and the exact three-term decomposition.

use crate::error::{invalid_param, Error, Result};
use crate::learners::{Learner, Play};
use crate::problems::{best_in_hindsight, Problem};
use crate::sources::Adversary;
use crate::sum::CompensatedSum;

/// Per-round and final regret of one online run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    /// `f(h_t, z_t)`, in expectation for mixed plays.
    pub per_round_loss: Vec<f64>,
    /// `Σ_{s ≤ t} f(h_s, z_s)`.
    pub cumulative: Vec<f64>,
    /// `min_h Σ_{s ≤ t} f(h, z_s)`.
    pub hindsight: Vec<f64>,
    pub cumulative_loss: f64,
    pub best_in_hindsight: f64,
    /// `R_m = cumulative_loss − best_in_hindsight`.
    pub regret: f64,
    pub average_regret: f64,
}

impl RegretLedger {
    pub fn rounds(&self) -> usize {
        self.per_round_loss.len()
    }

    /// `R_t` after round `t` (1-based).
    pub fn regret_at(&self, t: usize) -> f64 {
        self.cumulative[t - 1] - self.hindsight[t - 1]
    }
}

/// Everything produced by [`run_online`].
#[derive(Debug, Clone)]
pub struct OnlineRun<P: Problem> {
    pub ledger: RegretLedger,
    pub points: Vec<P::Point>,
    pub plays: Vec<Play<P::Hypothesis>>,
    pub best_hypothesis: P::Hypothesis,
}

/// Plays `m` rounds: `h_t = A(S_{t−1})`, then the adversary picks `z_t`.
pub fn run_online<P, L, A>(learner: &L, adversary: &mut A, problem: &P, m: usize) -> Result<OnlineRun<P>>
where
    P: Problem,
    L: Learner<P> + ?Sized,
    A: Adversary<P> + ?Sized,
{
    if m == 0 {
        return Err(invalid_param("rounds", "need at least one round"));
    }
    let mut session = learner.start(problem);
    let mut tracker = problem.hindsight_tracker();
    let mut points = Vec::with_capacity(m);
    let mut plays = Vec::with_capacity(m);
    let mut per_round_loss = Vec::with_capacity(m);
    let mut cumulative = Vec::with_capacity(m);
    let mut hindsight = Vec::with_capacity(m);
    let mut total = CompensatedSum::new();
    for round in 1..=m {
        let play = session.play()?;
        let z = adversary.next_point(problem, round, &points, &play)?;
        if !problem.contains_point(&z) {
            return Err(Error::InvalidDataPoint {
                round,
                detail: format!("{z:?} is outside the instance space of `{}`", problem.name()),
            });
        }
        let loss = play.expected_loss(problem, &z);
        total.add(loss);
        tracker.push(&z);
        per_round_loss.push(loss);
        cumulative.push(total.value());
        hindsight.push(tracker.best()?.1);
        session.observe(&z)?;
        points.push(z);
        plays.push(play);
    }
    let (best_hypothesis, best) = best_in_hindsight(problem, &points)?;
    *hindsight.last_mut().expect("m ≥ 1") = best;
    let cumulative_loss = total.value();
    let regret = cumulative_loss - best;
    Ok(OnlineRun {
        ledger: RegretLedger {
            per_round_loss,
            cumulative,
            hindsight,
            cumulative_loss,
            best_in_hindsight: best,
            regret,
            average_regret: regret / m as f64,
        },
        points,
        plays,
        best_hypothesis,
    })
}

/// `R_m = stability + aerm + drift`, with
/// stability `= Σ_i [f(A(S_{i−1}), z_i) − f(A(S_i), z_i)]`,
/// aerm `= Σ_i f(A(S_m), z_i) − min_h Σ_i f(h, z_i)` and
/// drift `= Σ_{i<m} Σ_{j≤i} [f(A(S_i), z_j) − f(A(S_{i+1}), z_j)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport {
    pub stability_term: f64,
    pub aerm_term: f64,
    pub drift_term: f64,
    pub total: f64,
    /// Regret computed directly, for the identity check.
    pub regret: f64,
}

/// Decomposes the regret of `learner` on a known sequence. Costs `O(m²)`
/// loss evaluations.
pub fn decompose_regret<P, L>(learner: &L, problem: &P, sequence: &[P::Point]) -> Result<DecompositionReport>
where
    P: Problem,
    L: Learner<P> + ?Sized,
{
    let m = sequence.len();
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    // plays[i] = A(S_i).
    let mut session = learner.start(problem);
    let mut plays = Vec::with_capacity(m + 1);
    for z in sequence {
        plays.push(session.play()?);
        session.observe(z)?;
    }
    plays.push(session.play()?);
    let loss = |i: usize, j: usize| plays[i].expected_loss(problem, &sequence[j - 1]);

    let (_, best) = best_in_hindsight(problem, sequence)?;
    let mut online = CompensatedSum::new();
    let mut stability = CompensatedSum::new();
    let mut aerm = CompensatedSum::new();
    for i in 1..=m {
        let before = loss(i - 1, i);
        online.add(before);
        stability.add(before);
        stability.add(-loss(i, i));
        aerm.add(loss(m, i));
    }
    aerm.add(-best);
    let mut drift = CompensatedSum::new();
    for i in 1..m {
        for j in 1..=i {
            drift.add(loss(i, j));
            drift.add(-loss(i + 1, j));
        }
    }
    let (stability_term, aerm_term, drift_term) = (stability.value(), aerm.value(), drift.value());
    let mut total = CompensatedSum::new();
    total.extend([stability_term, aerm_term, drift_term]);
    online.add(-best);
    Ok(DecompositionReport {
        stability_term,
        aerm_term,
        drift_term,
        total: total.value(),
        regret: online.value(),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::counterexamples::{MatchingPennies, ThresholdAdversary};
    use crate::learners::{Constant, FollowTheLeader, Ftrl, Hedge, Penalty, RegularizerSchedule, Rslm, SurrogateKind, Weights};
    use crate::problems::{empirical_risk, Absolute1d, BinaryGame, Dyadic, FiniteExperts, Quadratic1d, RandomizedBinary, ThresholdClass};
    use crate::sources::{FixedSequence, RandomSource};

    #[test]
    fn empirical_risk_examples() {
        let q = Quadratic1d::default();
        assert!((empirical_risk(&q, &0.3, &[0.2, 0.4]).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(empirical_risk(&q, &0.1, &[0.5]), Ok(q.loss(&0.1, &0.5)));
        let a = Absolute1d::new(1.0).unwrap();
        assert_eq!(empirical_risk(&a, &0.0, &[0.0, 1.0]), Ok(0.5));
        assert!(empirical_risk(&a, &0.0, &[]).unwrap_err().to_string().starts_with("undefined empirical risk"));
    }

    #[test]
    fn hindsight_examples() {
        assert_eq!(best_in_hindsight(&BinaryGame, &[1, 0, 1, 0]), Ok((0, 2.0)));
        let (h, v) = best_in_hindsight(&Quadratic1d::default(), &[0.2, 0.4]).unwrap();
        assert!((h - 0.3).abs() < 1e-15 && (v - 0.02).abs() < 1e-15);

        let th = ThresholdClass::<Dyadic>::new();
        let run = run_online(&FollowTheLeader, &mut ThresholdAdversary::new(), &th, 5).unwrap();
        let (t, v) = best_in_hindsight(&th, &run.points).unwrap();
        assert_eq!(v, 0.0);
        // x_6 after five rightward steps: 1/2 + 1/4 + … + 1/64.
        assert_eq!(t, Dyadic::new(63, 6));
    }

    #[test]
    fn run_online_examples() {
        let seq = vec![0.5, -0.2, 0.9];
        let run = run_online(&Constant(0.1), &mut FixedSequence::new(seq.clone()), &Quadratic1d::default(), 3).unwrap();
        let direct: f64 = seq.iter().map(|z| (0.1 - z) * (0.1 - z)).sum();
        assert!((run.ledger.cumulative_loss - direct).abs() < 1e-15);

        let run = run_online(&FollowTheLeader, &mut MatchingPennies, &BinaryGame, 4).unwrap();
        assert_eq!(run.points, vec![1, 0, 1, 0]);
        assert_eq!(run.ledger.per_round_loss, vec![1.0; 4]);
        assert_eq!(run.ledger.regret, 2.0);
        assert_eq!(run.ledger.average_regret, 0.5);
        assert_eq!(run.ledger.hindsight, vec![0.0, 1.0, 1.0, 2.0]);
        assert_eq!(run.ledger.regret_at(3), 2.0);

        let experts = FiniteExperts::new(2, 1.0).unwrap();
        let hedge = Hedge::with_default_schedule(vec![0, 1], 1.0).unwrap();
        let zeros = FixedSequence::new(vec![vec![0.0, 0.0]; 20]);
        let run = run_online(&hedge, &mut zeros.clone(), &experts, 20).unwrap();
        assert_eq!(run.ledger.regret, 0.0);
    }

    #[test]
    fn run_online_rejects_bad_points_and_zero_rounds() {
        let err = run_online(&FollowTheLeader, &mut FixedSequence::new(vec![1u8, 2]), &BinaryGame, 2).unwrap_err();
        assert!(matches!(err, Error::InvalidDataPoint { round: 2, .. }), "{err}");
        assert!(err.to_string().starts_with("invalid data point"));
        assert!(run_online(&FollowTheLeader, &mut MatchingPennies, &BinaryGame, 0).is_err());
        let short = run_online(&FollowTheLeader, &mut FixedSequence::new(vec![1u8]), &BinaryGame, 2);
        assert!(matches!(short, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn constant_learner_decomposition() {
        let seq = [0.3, -0.7, 0.1, 0.9];
        let q = Quadratic1d::default();
        let rep = decompose_regret(&Constant(0.5), &q, &seq).unwrap();
        assert_eq!(rep.stability_term, 0.0);
        assert_eq!(rep.drift_term, 0.0);
        assert!((rep.aerm_term - rep.regret).abs() < 1e-15);
    }

    #[test]
    fn ftl_decomposition_matches_ledger() {
        let q = Quadratic1d::default();
        let run = run_online(&FollowTheLeader, &mut RandomSource::new(3), &q, 50).unwrap();
        let rep = decompose_regret(&FollowTheLeader, &q, &run.points).unwrap();
        assert!((rep.total - run.ledger.regret).abs() <= 1e-9);
        assert!(rep.drift_term <= 1e-9);
    }

    fn check_identity<P: Problem, L: Learner<P>>(learner: &L, problem: &P, seq: &[P::Point]) -> DecompositionReport {
        let rep = decompose_regret(learner, problem, seq).unwrap();
        let run = run_online(learner, &mut FixedSequence::new(seq.to_vec()), problem, seq.len()).unwrap();
        let tol = 1e-9 * seq.len() as f64;
        assert!((rep.total - run.ledger.regret).abs() <= tol, "{rep:?} vs {}", run.ledger.regret);
        assert!((rep.total - rep.regret).abs() <= tol);
        rep
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn decomposition_identity_and_drift_signs(
            seq in prop::collection::vec(-1.0f64..=1.0, 1..40),
            scale in 0.05f64..2.0,
        ) {
            let q = Quadratic1d::default();
            let a = Absolute1d::new(1.0).unwrap();
            let rep = check_identity(&FollowTheLeader, &q, &seq);
            prop_assert!(rep.drift_term <= 1e-9);
            let rep = check_identity(&FollowTheLeader, &a, &seq);
            prop_assert!(rep.drift_term <= 1e-9);

            for penalty in [Penalty::Quadratic, Penalty::AbsoluteDeviation] {
                let sched = RegularizerSchedule::new(penalty, Weights::InverseSqrt { scale }, 0.0).unwrap();
                let rho = sched.rho_sum(seq.len(), -1.0, 1.0);
                let rep = check_identity(&Ftrl::new(sched.clone()), &q, &seq);
                prop_assert!(rep.drift_term <= rho + 1e-9);
                let rep = check_identity(&Ftrl::new(sched.clone()), &a, &seq);
                prop_assert!(rep.drift_term <= rho + 1e-9);
                check_identity(&Rslm::new(sched, SurrogateKind::Linear), &q, &seq);
            }
        }

        #[test]
        fn decomposition_identity_for_mixed_plays(bits in prop::collection::vec(0u8..2, 1..60)) {
            let hedge = Hedge::with_default_schedule(vec![0.0, 1.0], 1.0).unwrap();
            check_identity(&hedge, &RandomizedBinary, &bits);
            let rep = check_identity(&FollowTheLeader, &BinaryGame, &bits);
            prop_assert!(rep.drift_term <= 1e-9);
        }
    }
}
