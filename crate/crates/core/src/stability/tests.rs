use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::learners::{default_lambda_schedule, Constant, FollowTheLeader, Ftrl, Hedge, Penalty, RegularizerSchedule, Weights};
use crate::problems::{BinaryGame, FiniteExperts, Quadratic1d};

fn bernoulli_half(rng: &mut dyn RngCore) -> u8 {
    u8::from(rng.random::<bool>())
}

#[test]
fn online_gap_examples() {
    let q = Quadratic1d::default();
    assert_eq!(online_stability_gap(&Constant(0.2), &q, &[0.1, 0.9]), Ok(0.0));
    let g = online_stability_gap(&FollowTheLeader, &q, &[0.2, 0.4]).unwrap();
    assert!((g - 0.03).abs() < 1e-15);
    assert_eq!(online_stability_gap(&FollowTheLeader, &BinaryGame, &[1, 0, 1]), Ok(1.0));
    assert_eq!(online_stability_gap(&FollowTheLeader, &BinaryGame, &[]), Err(Error::EmptyDataset));
}

#[test]
fn uniform_loo_examples() {
    let q = Quadratic1d::default();
    assert_eq!(uniform_loo_gap(&Constant(0.0), &q, &[0.5, -0.5]).unwrap().max_gap, 0.0);
    let rep = uniform_loo_gap(&FollowTheLeader, &BinaryGame, &[1, 0]).unwrap();
    assert_eq!(rep.gaps, vec![0.0, 1.0]);
    assert_eq!(rep.max_gap, 1.0);
    assert_eq!(rep.kind, StabilityKind::UniformLoo);
}

#[test]
fn symmetric_learners_online_gap_is_last_loo_gap() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let q = Quadratic1d::default();
    let ftrl = Ftrl::new(RegularizerSchedule::new(Penalty::Quadratic, Weights::InverseSqrt { scale: 1.0 }, 0.0).unwrap());
    for _ in 0..100 {
        let n = r.random_range(1..30);
        let s: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..=1.0)).collect();
        for rep_online in [
            (uniform_loo_gap(&FollowTheLeader, &q, &s).unwrap(), online_stability_gap(&FollowTheLeader, &q, &s).unwrap()),
            (uniform_loo_gap(&ftrl, &q, &s).unwrap(), online_stability_gap(&ftrl, &q, &s).unwrap()),
        ] {
            let (rep, online) = rep_online;
            assert_eq!(rep.gaps[n - 1], online);
            assert!(online <= rep.max_gap);
            assert!(rep.gaps.iter().all(|&g| g >= 0.0));
        }
    }
}

#[test]
fn uniform_ro_examples() {
    let q = Quadratic1d::default();
    assert_eq!(uniform_ro_gap(&Constant(0.3), &q, &[0.0, 0.5], &[1.0, 1.0], &0.0), Ok(0.0));
    assert_eq!(uniform_ro_gap(&FollowTheLeader, &q, &[0.1, 0.7], &[0.1, 0.7], &0.4), Ok(0.0));
    assert_eq!(uniform_ro_gap(&FollowTheLeader, &q, &[0.0, 0.0], &[1.0, 1.0], &0.0), Ok(0.25));
    assert_eq!(
        uniform_ro_gap(&FollowTheLeader, &q, &[0.0, 0.0], &[1.0], &0.0),
        Err(Error::LengthMismatch { expected: 2, actual: 1 })
    );
}

#[test]
fn exact_binary_oracle_values() {
    // Frozen from C(m, m/2)·2^{−m}/2 for even m.
    for (m, expected) in [(100, 0.039794618693589384), (400, 0.019934650981896465), (1600, 0.00997199876359562)] {
        let v = binary_erm_all_i_loo_exact(m, 0.5).unwrap();
        assert!((v - expected).abs() < 1e-12 * m as f64, "m={m}: {v}");
        assert!(v <= 2.0 / (m as f64).sqrt());
    }
    // Small cases by exhaustive enumeration.
    for (m, expected) in [(1, 0.5), (2, 0.25), (3, 0.25), (5, 0.1875), (8, 0.13671875)] {
        assert!((binary_erm_all_i_loo_exact(m, 0.5).unwrap() - expected).abs() < 1e-14);
    }
    assert!(binary_erm_all_i_loo_exact(0, 0.5).is_err());
    assert!(binary_erm_all_i_loo_exact(5, 1.5).is_err());
}

#[test]
fn all_i_loo_examples() {
    let q = Quadratic1d::default();
    let sampler = |rng: &mut dyn RngCore| rng.random_range(-1.0..=1.0);
    let rep = all_i_loo_estimate(&Constant(0.0), &q, sampler, 10, 50, 3).unwrap();
    assert_eq!(rep.max_gap, 0.0);
    assert_eq!(rep.sample_count, 50);

    // A point-mass sampler gives the same gap in every sample.
    let rep = all_i_loo_estimate(&FollowTheLeader, &BinaryGame, |_: &mut dyn RngCore| 1u8, 5, 40, 3).unwrap();
    assert!(rep.std_errors.iter().all(|&s| s == 0.0));
    let single = uniform_loo_gap(&FollowTheLeader, &BinaryGame, &[1, 1, 1, 1, 1]).unwrap();
    assert_eq!(rep.gaps, single.gaps);

    let m = 400;
    let rep = all_i_loo_estimate(&FollowTheLeader, &BinaryGame, bernoulli_half, m, 2000, 7).unwrap();
    assert!(rep.max_gap <= 2.0 / (m as f64).sqrt(), "{}", rep.max_gap);
    let exact = binary_erm_all_i_loo_exact(m, 0.5).unwrap();
    let se = rep.std_errors.iter().sum::<f64>() / m as f64 / (m as f64).sqrt();
    assert!((rep.mean_gap() - exact).abs() <= 3.0 * rep.std_errors[0].max(se), "{} vs {exact}", rep.mean_gap());
}

#[test]
fn all_i_loo_is_reproducible_across_thread_counts() {
    let run = || all_i_loo_estimate(&FollowTheLeader, &BinaryGame, bernoulli_half, 50, 300, 11).unwrap();
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let parallel = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
    assert_eq!(serial, parallel);
    assert_eq!(run(), serial);
    assert_ne!(all_i_loo_estimate(&FollowTheLeader, &BinaryGame, bernoulli_half, 50, 300, 12).unwrap(), serial);
}

#[test]
fn implication_ordering() {
    // all-i-LOO mean ≤ uniform-LOO max over the same datasets.
    let mut worst = 0.0f64;
    for s in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        rng.set_stream(s);
        let data: Vec<u8> = (0..20).map(|_| bernoulli_half(&mut rng)).collect();
        worst = worst.max(uniform_loo_gap(&FollowTheLeader, &BinaryGame, &data).unwrap().max_gap);
    }
    let rep = all_i_loo_estimate(&FollowTheLeader, &BinaryGame, bernoulli_half, 20, 200, 5).unwrap();
    assert!(rep.max_gap <= worst);
}

#[test]
fn hedge_loo_gap_within_rate() {
    let mut r = ChaCha8Rng::seed_from_u64(9);
    for d in [2, 10] {
        let experts = FiniteExperts::new(d, 1.0).unwrap();
        let hedge = Hedge::new((0..d).collect(), default_lambda_schedule(1.0, d).unwrap()).unwrap();
        for m in [1, 2, 5, 20, 100] {
            let rates = rate_hedge(1.0, d, m).unwrap();
            for _ in 0..20 {
                let data: Vec<Vec<f64>> = (0..m).map(|_| experts.sample_point(&mut r)).collect();
                let rep = uniform_loo_gap(&hedge, &experts, &data).unwrap();
                assert!(rep.max_gap <= rates.loo.at(m));
            }
        }
    }
}

#[test]
fn leave_one_out_plays_match_learner_override() {
    let bits = [1u8, 0, 0, 1, 1];
    assert_eq!(
        leave_one_out_plays(&FollowTheLeader, &BinaryGame, &bits).unwrap(),
        crate::learners::Learner::<BinaryGame>::leave_one_out(&FollowTheLeader, &BinaryGame, &bits).unwrap()
    );
}

#[test]
fn strongly_convex_rate_examples() {
    let t = rate_loo_strongly_convex_loss(1.0, 1.0, 10).unwrap();
    assert_eq!(t.at(2), 1.0);
    let t = rate_loo_strongly_convex_loss(4.0, 2.0, 2000).unwrap();
    assert!((t.at(1000) - 0.016).abs() < 1e-15);
    assert_eq!(t.at(1000) / t.at(500), 0.5);
    assert!(rate_loo_strongly_convex_loss(0.0, 1.0, 3).is_err());
}

#[test]
fn convex_reg_rate_examples() {
    let zero = rate_loo_convex_reg(1.0, &|_| 0.0, &|_| 1.0, 50).unwrap();
    for m in 1..=50 {
        assert!((zero.at(m) - 2.0 / (m as f64 + 1.0)).abs() < 1e-15);
    }
    let with_reg = rate_loo_convex_reg(1.0, &|_| 1.0, &|_| 1.0, 50).unwrap();
    assert_eq!(with_reg.at(7), 2.0 * zero.at(7));
    let sqrt = rate_loo_convex_reg(1.0, &|_| 0.0, &|i| 1.0 / (i.max(1) as f64).sqrt(), 40_000).unwrap();
    let ratio = sqrt.at(40_000) / sqrt.at(10_000);
    assert!((ratio - 0.5).abs() < 0.01, "{ratio}");
}

#[test]
fn bounded_reg_rate_examples() {
    let first_only = rate_loo_bounded_reg(1.0, &|_| 0.0, &|_| 1.0, 5).unwrap();
    assert_eq!(first_only.at(3), 2.0 / 4.0);
    let t = rate_loo_bounded_reg(1.0, &|_| 1.0, &|_| 1.0, 5).unwrap();
    assert_eq!(t.at(1), 2.0);
    let bigger = rate_loo_bounded_reg(1.0, &|_| 1.0, &|_| 2.0, 5).unwrap();
    assert!(bigger.values.iter().zip(&t.values).all(|(b, a)| b < a));
}

#[test]
fn rerm_regret_rate_examples() {
    let (l, nu, m_max) = (4.0, 2.0, 500);
    let on = rate_loo_strongly_convex_loss(l, nu, m_max).unwrap();
    let regret = rate_regret_rerm(&on, &|_| 0.0, m_max).unwrap();
    let mut harmonic = 0.0;
    for m in 1..=m_max {
        harmonic += 1.0 / m as f64;
        let expected = 2.0 * l * l / nu * harmonic / m as f64;
        assert!((regret.at(m) - expected).abs() < 1e-12 * expected);
    }
    let zero = RateTable { name: "zero".into(), values: vec![0.0; 10], params: vec![] };
    assert!(rate_regret_rerm(&zero, &|_| 0.0, 10).unwrap().values.iter().all(|&v| v == 0.0));
    let sqrt = RateTable { name: "sqrt".into(), values: (1..=40_000).map(|i| 1.0 / (i as f64).sqrt()).collect(), params: vec![] };
    let r = rate_regret_rerm(&sqrt, &|i| 1.0 / (i.max(1) as f64).sqrt(), 40_000).unwrap();
    let ratio = r.at(40_000) / r.at(10_000);
    assert!((ratio - 0.5).abs() < 0.01, "{ratio}");
    assert!(rate_regret_rerm(&zero, &|_| 0.0, 11).is_err());
}

#[test]
fn always_aerm_rate_examples() {
    let on = |i: usize| 1.0 / i as f64;
    let case1 = rate_regret_always_aerm(AermCase::OnlineStable, &|_| 0.0, &|_| 0.0, &|_| 0.0, &on, 100);
    let table = RateTable { name: "on".into(), values: (1..=100).map(on).collect(), params: vec![] };
    let rerm = rate_regret_rerm(&table, &|_| 0.0, 100).unwrap();
    for m in 1..=100 {
        assert!((case1.at(m) - rerm.at(m)).abs() < 1e-15);
    }
    let sq = |i: usize| 1.0 / (i * i) as f64;
    let t = rate_regret_always_aerm(AermCase::OnlineStable, &sq, &|_| 0.0, &|_| 0.0, &|_| 0.0, 1000);
    for m in 1..=1000 {
        assert!(t.at(m) <= (1.0 + (m as f64).ln()) / m as f64 + 1e-15);
    }
    let t = rate_regret_always_aerm(AermCase::SymmetricLooRo, &sq, &sq, &sq, &|_| 0.0, 1000);
    for m in 1..=1000 {
        let mf = m as f64;
        assert!(t.at(m) <= (std::f64::consts::PI.powi(2) / 6.0 + 1.0 + 2.0 * (1.0 + mf.ln())) / mf);
    }
    // m = 2: (1 + 1/4)/2 + 1/4 + (1/2)(1·2) = 1.875.
    assert!((t.at(2) - 1.875).abs() < 1e-15);
    assert_eq!(AermCase::try_from(1), Ok(AermCase::OnlineStable));
    assert!(AermCase::try_from(3).unwrap_err().to_string().contains("unknown case"));
}

#[test]
fn hedge_rate_examples() {
    let r = rate_hedge(1.0, 2, 10).unwrap();
    // Frozen from direct evaluation of the closed forms.
    assert!((r.loo.at(4) - 0.6557468922785742).abs() < 1e-12);
    assert!((r.erm.at(1) - 0.8830575168866059).abs() < 1e-12);
    assert!((r.regret.at(4) - 2.321350505322458).abs() < 1e-12);
    let doubled = rate_hedge(2.0, 2, 10).unwrap();
    for (a, b) in [(&r.loo, &doubled.loo), (&r.erm, &doubled.erm), (&r.regret, &doubled.regret)] {
        for m in 1..=10 {
            assert!((2.0 * a.at(m) - b.at(m)).abs() < 1e-14);
        }
    }
    assert_eq!(rate_hedge(1.0, 1, 10), Err(Error::DegenerateExpertSet(1)));
}

#[test]
fn shipped_rates_are_non_increasing() {
    let m = 100_000;
    let lambda = |i: usize| 1.0 / (i.max(1) as f64).sqrt();
    let tables = [
        rate_loo_strongly_convex_loss(4.0, 2.0, m).unwrap(),
        rate_loo_convex_reg(1.0, &|i| 2.0 * lambda(i), &|i| 2.0 * lambda(i), m).unwrap(),
        rate_loo_bounded_reg(1.0, &lambda, &|i| 2.0 * lambda(i), m).unwrap(),
        rate_hedge(1.0, 2, m).unwrap().loo,
        rate_hedge(1.0, 10, m).unwrap().erm,
        rate_hedge(1.0, 100, m).unwrap().regret,
    ];
    let stab = rate_loo_bounded_reg(1.0, &lambda, &|i| 2.0 * lambda(i), m).unwrap();
    let composed = rate_regret_rerm(&stab, &lambda, m).unwrap();
    for t in tables.iter().chain([&composed]) {
        assert!(t.is_non_increasing(), "{}", t.name);
        assert!(t.values.iter().all(|v| v.is_finite()));
    }
}
