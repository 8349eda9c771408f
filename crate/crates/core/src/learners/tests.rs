use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::problems::{Absolute1d, BinaryGame, FiniteExperts, Quadratic1d, RandomizedBinary, ScalarProblem};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn quad_reg(lambdas: Vec<f64>, center: f64) -> RegularizerSchedule {
    RegularizerSchedule::new(Penalty::Quadratic, Weights::Explicit(lambdas), center).unwrap()
}

fn pure<H: Clone>(p: Play<H>) -> H {
    p.as_pure().cloned().expect("pure play")
}

#[test]
fn erm_examples() {
    let q = Quadratic1d::default();
    assert!((erm_select(&q, &[0.2, 0.4]).unwrap() - 0.3).abs() < 1e-15);
    assert_eq!(erm_select(&BinaryGame, &[1]), Ok(1));
    assert_eq!(erm_select(&BinaryGame, &[1, 0]), Ok(0));
    assert_eq!(erm_select(&BinaryGame, &[]), Ok(0));
    let h = pure(Learner::<Quadratic1d>::select(&FollowTheLeader, &q, &[0.2, 0.4]).unwrap());
    assert!((h - 0.3).abs() < 1e-15);
}

#[test]
fn rerm_examples() {
    let a = Absolute1d::new(1.0).unwrap();
    let h = rerm_select(&a, &[1.0], &quad_reg(vec![0.5, 0.5], 0.0)).unwrap();
    assert!((h - 0.5).abs() < 1e-12);
    let q = Quadratic1d::default();
    assert_eq!(rerm_select(&q, &[], &quad_reg(vec![3.0], 0.25)), Ok(0.25));
}

fn check_rerm_reduces_to_erm<P: ScalarProblem>(p: &P, seed: u64) {
    let mut r = rng(seed);
    let zero = RegularizerSchedule::zero();
    for _ in 0..1000 {
        let n = r.random_range(0..12);
        let s: Vec<P::Point> = (0..n).map(|_| p.sample_point(&mut r)).collect();
        assert_eq!(rerm_select(p, &s, &zero).unwrap(), erm_select(p, &s).unwrap(), "{s:?}");
        let rslm = Rslm::new(zero.clone(), SurrogateKind::Exact);
        assert_eq!(pure(rslm.select(p, &s).unwrap()), erm_select(p, &s).unwrap());
    }
}

#[test]
fn zero_regularizers_give_erm() {
    check_rerm_reduces_to_erm(&Quadratic1d::default(), 1);
    check_rerm_reduces_to_erm(&Absolute1d::new(1.0).unwrap(), 2);
    check_rerm_reduces_to_erm(&RandomizedBinary, 3);
}

#[test]
fn rerm_matches_grid_search() {
    let a = Absolute1d::new(1.0).unwrap();
    let sched = RegularizerSchedule::new(Penalty::Quadratic, Weights::InverseSqrt { scale: 0.7 }, 0.1).unwrap();
    let mut r = rng(4);
    for _ in 0..200 {
        let n = r.random_range(0..8);
        let s: Vec<f64> = (0..n).map(|_| a.sample_point(&mut r)).collect();
        let objective = |h: f64| crate::problems::total_loss(&a, &h, &s) + sched.cumulative(n, h);
        let h = rerm_select(&a, &s, &sched).unwrap();
        let grid = (0..=20000).map(|k| objective(-1.0 + k as f64 * 1e-4)).fold(f64::INFINITY, f64::min);
        assert!(objective(h) <= grid + 1e-9);
    }
}

#[test]
fn regularizer_constants() {
    let s = RegularizerSchedule::new(Penalty::Quadratic, Weights::InverseSqrt { scale: 2.0 }, 0.0).unwrap();
    assert_eq!(s.lambda(0), 2.0);
    assert_eq!(s.lambda(4), 1.0);
    assert_eq!(s.rho(4, -1.0, 1.0), 1.0);
    assert_eq!(s.strong_convexity(4), 2.0);
    assert_eq!(s.lipschitz(4, -1.0, 1.0), 2.0);
    let off = RegularizerSchedule::new(Penalty::AbsoluteDeviation, Weights::Explicit(vec![1.0]), 2.0).unwrap();
    assert_eq!(off.rho(0, -1.0, 1.0), 2.0);
    assert_eq!(off.rho(1, -1.0, 1.0), 0.0);
    assert!(RegularizerSchedule::new(Penalty::Quadratic, Weights::Explicit(vec![-1.0]), 0.0).is_err());

    // Sampled ranges never exceed ρ_i.
    let mut r = rng(5);
    for i in 0..20 {
        for _ in 0..200 {
            let (h1, h2): (f64, f64) = (r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0));
            assert!((s.eval(i, h1) - s.eval(i, h2)).abs() <= s.rho(i, -1.0, 1.0) + 1e-12);
        }
    }
}

#[test]
fn linearize_examples() {
    let q = Quadratic1d::default();
    let s = linearize(&q, 0.0, &1.0).unwrap();
    assert_eq!((s.eval(0.0), s.eval(1.0)), (1.0, -1.0));
    let s = linearize(&RandomizedBinary, 0.3, &1).unwrap();
    for p in [0.0, 0.25, 0.9] {
        assert!((s.eval(p) - RandomizedBinary.loss(&p, &1)).abs() < 1e-15);
    }
    let a = Absolute1d::new(1.0).unwrap();
    let s = linearize(&a, 0.4, &0.4).unwrap();
    assert_eq!(s.slope, 0.0);
    assert_eq!(linearize(&BinaryGameScalar, 0.0, &0).unwrap_err(), Error::NoGradient("binary_scalar".into()));
}

/// A scalar problem without a gradient oracle.
struct BinaryGameScalar;

impl crate::problems::Problem for BinaryGameScalar {
    type Hypothesis = f64;
    type Point = u8;
    fn name(&self) -> &'static str {
        "binary_scalar"
    }
    fn loss(&self, h: &f64, z: &u8) -> f64 {
        (h - f64::from(*z)).abs().round()
    }
    fn metadata(&self) -> crate::problems::LossMetadata {
        Default::default()
    }
    fn default_hypothesis(&self) -> f64 {
        0.0
    }
    fn contains_point(&self, _: &u8) -> bool {
        true
    }
    fn contains_hypothesis(&self, _: &f64) -> bool {
        true
    }
    fn exact_erm(&self, _: &[u8]) -> Option<f64> {
        None
    }
    fn sample_hypothesis(&self, _: &mut dyn rand::RngCore) -> f64 {
        0.0
    }
    fn sample_point(&self, _: &mut dyn rand::RngCore) -> u8 {
        0
    }
}

impl ScalarProblem for BinaryGameScalar {
    fn interval(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn is_convex(&self) -> bool {
        false
    }
}

#[test]
fn nonconvex_rerm_is_rejected() {
    let err = rerm_select(&BinaryGameScalar, &[1], &RegularizerSchedule::zero()).unwrap_err();
    assert!(err.to_string().starts_with("unsupported objective"), "{err}");
}

#[test]
fn rslm_examples() {
    let q = Quadratic1d::default();
    let s = Surrogate { anchor: 0.0, value: 1.0, slope: -2.0 };
    assert_eq!(rslm_select(&q, &[s], &quad_reg(vec![1.0, 0.0], 0.0)), 1.0);

    // Linear surrogates plus quadratic regularizers: clipped weighted average.
    let mut r = rng(6);
    for _ in 0..200 {
        let n = r.random_range(1..6);
        let sur: Vec<Surrogate> = (0..n)
            .map(|_| Surrogate { anchor: r.random_range(-1.0..1.0), value: r.random(), slope: r.random_range(-2.0..2.0) })
            .collect();
        let lambdas: Vec<f64> = (0..=n).map(|_| r.random_range(0.1..2.0)).collect();
        let c: f64 = r.random_range(-0.5..0.5);
        let slope: f64 = sur.iter().map(|s| s.slope).sum();
        let total: f64 = lambdas.iter().sum();
        let expected = (c - slope / (2.0 * total)).clamp(-1.0, 1.0);
        let h = rslm_select(&q, &sur, &quad_reg(lambdas, c));
        assert!((h - expected).abs() < 1e-12, "{h} vs {expected}");
    }
}

#[test]
fn linear_rslm_on_linear_loss_is_rerm() {
    let sched = RegularizerSchedule::new(Penalty::Quadratic, Weights::InverseSqrt { scale: 1.0 }, 0.5).unwrap();
    let rslm = Rslm::new(sched.clone(), SurrogateKind::Linear);
    let mut r = rng(7);
    for _ in 0..100 {
        let s: Vec<u8> = (0..20).map(|_| u8::from(r.random::<bool>())).collect();
        let a = pure(rslm.select(&RandomizedBinary, &s).unwrap());
        let b = rerm_select(&RandomizedBinary, &s, &sched).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
    assert!(!Learner::<RandomizedBinary>::is_symmetric(&rslm));
}

#[test]
fn surrogates_dominate_regret() {
    let q = Quadratic1d::default();
    let a = Absolute1d::new(1.0).unwrap();
    let mut r = rng(8);
    for _ in 0..50 {
        let (anchor, z): (f64, f64) = (r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0));
        let sq = linearize(&q, anchor, &z).unwrap();
        let sa = linearize(&a, anchor, &z).unwrap();
        let sa_kink = linearize(&a, z, &z).unwrap();
        for _ in 0..1000 {
            let h: f64 = r.random_range(-1.0..=1.0);
            assert!(q.loss(&anchor, &z) - q.loss(&h, &z) <= sq.eval(anchor) - sq.eval(h) + 1e-12);
            assert!(a.loss(&anchor, &z) - a.loss(&h, &z) <= sa.eval(anchor) - sa.eval(h) + 1e-12);
            assert!(a.loss(&z, &z) - a.loss(&h, &z) <= sa_kink.eval(z) - sa_kink.eval(h) + 1e-12);
        }
    }
}

fn sessions_match_select<P: crate::problems::Problem, L: Learner<P>>(learner: &L, problem: &P, data: &[P::Point]) {
    let mut session = learner.start(problem);
    for i in 0..=data.len() {
        assert_eq!(session.play().unwrap(), learner.select(problem, &data[..i]).unwrap(), "round {i}");
        if i < data.len() {
            session.observe(&data[i]).unwrap();
        }
    }
}

#[test]
fn incremental_sessions_agree_with_batch_selection() {
    let mut r = rng(9);
    let q = Quadratic1d::default();
    let qs: Vec<f64> = (0..40).map(|_| q.sample_point(&mut r)).collect();
    let sched = RegularizerSchedule::new(Penalty::Quadratic, Weights::InverseSqrt { scale: 1.0 }, 0.0).unwrap();
    sessions_match_select(&Ftrl::new(sched.clone()), &q, &qs);
    sessions_match_select(&Rslm::new(sched.clone(), SurrogateKind::Linear), &q, &qs);
    sessions_match_select(&Rslm::new(sched.clone(), SurrogateKind::Exact), &q, &qs);
    sessions_match_select(&FollowTheLeader, &q, &qs);
    let a = Absolute1d::new(1.0).unwrap();
    sessions_match_select(&Ftrl::new(sched), &a, &qs);

    let experts = FiniteExperts::new(4, 1.0).unwrap();
    let es: Vec<Vec<f64>> = (0..30).map(|_| experts.sample_point(&mut r)).collect();
    let hedge = Hedge::with_default_schedule((0..4).collect(), 1.0).unwrap();
    sessions_match_select(&hedge, &experts, &es);
}

#[test]
fn overridden_leave_one_out_matches_naive() {
    let mut r = rng(10);
    let experts = FiniteExperts::new(3, 1.0).unwrap();
    let es: Vec<Vec<f64>> = (0..12).map(|_| experts.sample_point(&mut r)).collect();
    let hedge = Hedge::with_default_schedule((0..3).collect(), 1.0).unwrap();
    let fast = hedge.leave_one_out(&experts, &es).unwrap();
    for (i, play) in fast.iter().enumerate() {
        let naive = hedge.select(&experts, &crate::dataset::without(&es, i)).unwrap();
        let (Play::Mixed(a), Play::Mixed(b)) = (play, &naive) else { panic!("mixed plays") };
        for (x, y) in a.weights.weights().iter().zip(b.weights.weights()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
    let bits: Vec<u8> = (0..15).map(|_| u8::from(r.random::<bool>())).collect();
    let fast = Learner::<BinaryGame>::leave_one_out(&FollowTheLeader, &BinaryGame, &bits).unwrap();
    for (i, play) in fast.iter().enumerate() {
        assert_eq!(*play, FollowTheLeader.select(&BinaryGame, &crate::dataset::without(&bits, i)).unwrap());
    }
}

#[test]
fn hedge_select_examples() {
    assert_eq!(hedge_select(&[0.0, 0.0], 3.0).unwrap().weights(), &[0.5, 0.5]);
    let w = hedge_select(&[1.0, 0.0], 2f64.ln()).unwrap();
    assert!((w.weights()[0] - 1.0 / 3.0).abs() < 1e-15 && (w.weights()[1] - 2.0 / 3.0).abs() < 1e-15);
    let w = hedge_select(&[0.0, 1e6], 1.0).unwrap();
    assert_eq!(w.weights(), &[1.0, 0.0]);
    assert_eq!(hedge_select(&[], 1.0), Err(Error::EmptyExpertSet));
}

#[test]
fn default_schedule_examples() {
    let s = default_lambda_schedule(1.0, 2).unwrap();
    assert!((s.lambda(0) - 0.424661).abs() < 1e-6);
    assert_eq!(s.lambda(0), s.lambda(1));
    assert!((s.eta(1) - 1.177410).abs() < 1e-6);
    for t in 1..50 {
        assert!((s.lambda(t) / s.lambda(4 * t) - 2.0).abs() < 1e-12);
    }
    assert_eq!(default_lambda_schedule(1.0, 1), Err(Error::DegenerateExpertSet(1)));
    let err = default_lambda_schedule(1.0, 0).unwrap_err();
    assert!(err.to_string().starts_with("degenerate expert set"));
}

#[test]
fn kl_examples() {
    assert_eq!(kl_to_uniform(&ExpertDistribution::uniform(5).unwrap()), 0.0);
    let point = ExpertDistribution::point_mass(2, 0).unwrap();
    assert!((kl_to_uniform(&point) - 2f64.ln()).abs() < 1e-15);
    let theta = ExpertDistribution::new(vec![0.75, 0.25]).unwrap();
    assert!((kl_to_uniform(&theta) - 0.130812).abs() < 1e-6);
}

fn simplex_grid(d: usize, steps: usize) -> Vec<Vec<f64>> {
    let step = 1.0 / steps as f64;
    match d {
        2 => (0..=steps).map(|i| vec![i as f64 * step, 1.0 - i as f64 * step]).collect(),
        3 => {
            let mut out = Vec::new();
            for i in 0..=steps {
                for j in 0..=steps - i {
                    let (a, b) = (i as f64 * step, j as f64 * step);
                    out.push(vec![a, b, (1.0 - a - b).max(0.0)]);
                }
            }
            out
        }
        _ => unreachable!(),
    }
}

/// Objective without validation, for grid points whose sum is off by rounding.
fn raw_objective(theta: &[f64], table: &[Vec<f64>], schedule: &LambdaSchedule, t: usize) -> f64 {
    let d = theta.len() as f64;
    let expected: f64 = theta.iter().zip(table).map(|(w, row)| w * row[..t].iter().sum::<f64>()).sum();
    let kl: f64 = theta.iter().filter(|&&w| w > 0.0).map(|&w| w * (d * w).ln()).sum();
    expected + schedule.cumulative(t) * kl
}

#[test]
fn hedge_objective_examples() {
    let sched = LambdaSchedule::Explicit(vec![1.0, 1.0]);
    let uniform = ExpertDistribution::uniform(2).unwrap();
    assert_eq!(hedge_rerm_objective(&uniform, &[vec![0.0], vec![0.0]], &sched, 1), Ok(0.0));
    let table = vec![vec![0.0], vec![1.0]];
    let theta = hedge_select(&[0.0, 1.0], sched.eta(1)).unwrap();
    assert_eq!(sched.eta(1), 0.5);
    let obj = hedge_rerm_objective(&theta, &table, &sched, 1).unwrap();
    for g in simplex_grid(2, 1000) {
        assert!(obj <= raw_objective(&g, &table, &sched, 1) + 1e-12);
    }
    let best = ExpertDistribution::point_mass(2, 0).unwrap();
    assert!(obj <= hedge_rerm_objective(&best, &table, &sched, 1).unwrap());
}

#[test]
fn hedge_minimizes_kl_regularized_objective() {
    let mut r = rng(11);
    for trial in 0..100 {
        let d = if trial % 2 == 0 { 2 } else { 3 };
        let m = r.random_range(1..6);
        let table: Vec<Vec<f64>> = (0..d).map(|_| (0..m).map(|_| r.random()).collect()).collect();
        let sched = default_lambda_schedule(1.0, d).unwrap();
        let totals: Vec<f64> = table.iter().map(|row| row.iter().sum()).collect();
        let theta = hedge_select(&totals, sched.eta(m)).unwrap();
        let obj = hedge_rerm_objective(&theta, &table, &sched, m).unwrap();
        let grid_min = simplex_grid(d, 1000)
            .iter()
            .map(|g| raw_objective(g, &table, &sched, m))
            .fold(f64::INFINITY, f64::min);
        assert!(obj <= grid_min + 1e-6, "trial {trial}: {obj} vs {grid_min}");
    }
}

#[test]
fn distribution_validation() {
    assert!(ExpertDistribution::new(vec![0.5, 0.6]).is_err());
    assert!(ExpertDistribution::new(vec![-0.1, 1.1]).is_err());
    assert_eq!(ExpertDistribution::new(vec![]), Err(Error::EmptyExpertSet));
    assert!(Hedge::new(vec![0u8, 1], LambdaSchedule::Explicit(vec![1.0, 2.0])).is_err());
    assert_eq!(Hedge::<u8>::new(vec![], LambdaSchedule::Constant(1.0)), Err(Error::EmptyExpertSet));
}

proptest! {
    #[test]
    fn hedge_weights_are_normalized(
        losses in prop::collection::vec(-1e6f64..1e6, 1..40),
        eta in 0.0f64..1e3,
    ) {
        let theta = hedge_select(&losses, eta).unwrap();
        let total: f64 = theta.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(theta.weights().iter().all(|&w| w >= 0.0));
        prop_assert!(ExpertDistribution::new(theta.weights().to_vec()).is_ok());
    }

    #[test]
    fn mixed_play_expectation_is_convex_combination(
        weights in prop::collection::vec(0.01f64..1.0, 2..6),
        z in 0u8..2,
    ) {
        let total: f64 = weights.iter().sum();
        let theta = ExpertDistribution::new(weights.iter().map(|w| w / total).collect());
        prop_assume!(theta.is_ok());
        let theta = theta.unwrap();
        let experts: Vec<f64> = (0..theta.len()).map(|i| i as f64 / (theta.len() - 1) as f64).collect();
        let p = theta.weights().iter().zip(&experts).map(|(w, e)| w * e).sum::<f64>();
        let play = Play::Mixed(Mixture { experts: experts.into(), weights: theta });
        let direct = RandomizedBinary.loss(&p, &z);
        prop_assert!((play.expected_loss(&RandomizedBinary, &z) - direct).abs() < 1e-12);
    }
}
