use serde_json::json;
use stablab::config::{AdversaryConfig, Component, ExperimentConfig, Format};
use stablab::experiment::{cover, prefix_grid, resolve_problem, stability, StabilityMode};
use stablab::output::{ledger_csv, run_json, sweep_csv};
use stablab::{check_bounds, check_ledger, counterexample_config, rate_table, rates_csv, run, sweep, with_threads, HarnessError, SweepConfig};
use stablab_core::problems::AnyProblem;
use stablab_core::stability::RateTable;
use stablab_core::{Error, RegretLedger};

fn hedge_experts(d: f64, m: usize, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(
        Component::named("finite_experts").with("d", d).with("B", 1.0),
        Component::named("hedge"),
        AdversaryConfig::named("random"),
        m,
    );
    c.seed = seed;
    c
}

fn field_of(err: HarnessError) -> String {
    match err {
        HarnessError::Config { field, .. } => field,
        other => panic!("expected a config error, got {other}"),
    }
}

#[test]
fn runs_are_byte_reproducible() {
    let c = hedge_experts(2.0, 100, 7);
    let a = ledger_csv(&run(&c).unwrap());
    let b = ledger_csv(&run(&c).unwrap());
    assert_eq!(a, b);
    assert!(a.ends_with('\n'));
    assert_eq!(a.lines().count(), 101);
    assert_eq!(a.lines().next().unwrap(), "round,loss,cum_loss,hindsight,regret,avg_regret");
    let other = ledger_csv(&run(&hedge_experts(2.0, 100, 8)).unwrap());
    assert_ne!(a, other);
}

#[test]
fn ftl_loses_matching_pennies() {
    let run = run(&counterexample_config("matching_pennies", 1000, 0).unwrap()).unwrap();
    assert!(run.ledger.average_regret >= 0.499);
}

#[test]
fn hedge_meets_its_bound_against_greedy_tables() {
    let mut c = hedge_experts(10.0, 10_000, 1);
    c.adversary = AdversaryConfig::named("greedy");
    c.bound = Some("hedge".into());
    let art = run(&c).unwrap();
    let check = art.bound_check.as_ref().unwrap();
    assert!(check.pass, "violation {} at {}", check.max_violation, check.worst_m);
    assert_eq!(check.points.len(), 10_000);
    let csv = ledger_csv(&art);
    assert!(csv.starts_with("round,loss,cum_loss,hindsight,regret,avg_regret,bound\n"));
}

#[test]
fn check_bounds_examples() {
    let mut c = ExperimentConfig::new(
        Component::named("finite_experts").with("d", 3.0),
        Component::named("constant").with("index", 1.0),
        AdversaryConfig {
            name: "fixed".into(),
            sequence: Some(vec![json!([0.0, 0.0, 0.0]); 5]),
        },
        5,
    );
    c.seed = 3;
    let art = run(&c).unwrap();
    let zero = RateTable {
        name: "zero".into(),
        values: vec![0.0; 5],
        params: vec![],
    };
    assert!(check_ledger(&art.ledger, &zero, 0.0).unwrap().pass);

    let fabricated = RegretLedger {
        per_round_loss: vec![0.1, 0.1, 1.0, 0.1],
        cumulative: vec![0.1, 0.2, 1.2, 1.3],
        hindsight: vec![0.0; 4],
        cumulative_loss: 1.3,
        best_in_hindsight: 0.0,
        regret: 1.3,
        average_regret: 0.325,
    };
    let table = RateTable {
        name: "flat".into(),
        values: vec![0.35; 4],
        params: vec![],
    };
    let check = check_ledger(&fabricated, &table, 0.0).unwrap();
    assert!(!check.pass);
    assert_eq!(check.worst_m, 3);
    assert!((check.max_violation - 0.05).abs() < 1e-12);

    let err = check_bounds(&[0.0; 3], &table, 0.0).unwrap_err();
    assert!(matches!(err, HarnessError::Core(Error::LengthMismatch { expected: 4, actual: 3 })));
}

#[test]
fn ftl_quadratic_loo_gaps_meet_the_strongly_convex_table() {
    let mut c = ExperimentConfig::new(
        Component::named("quadratic_1d"),
        Component::named("ftl"),
        AdversaryConfig::named("random"),
        200,
    );
    c.seed = 11;
    c.bound = Some("harmonic".into());
    let s = stability(&c, StabilityMode::UniformLoo, 0).unwrap();
    assert!(s.passed());
    assert_eq!(s.rows.iter().map(|r| r.m).collect::<Vec<_>>(), prefix_grid(200));
    let r = run(&c).unwrap();
    assert!(r.passed());

    let online = stability(&c, StabilityMode::Online, 0).unwrap();
    assert!(online.passed());
}

#[test]
fn ftrl_meets_its_composed_table() {
    let mut c = ExperimentConfig::new(
        Component::named("absolute_1d"),
        Component::named("ftrl"),
        AdversaryConfig::named("random"),
        300,
    );
    c.seed = 2;
    c.bound = Some("ftrl".into());
    assert!(run(&c).unwrap().passed());
    assert!(stability(&c, StabilityMode::UniformLoo, 0).unwrap().passed());
}

#[test]
fn all_i_loo_rows_per_index() {
    let mut c = ExperimentConfig::new(
        Component::named("binary_game"),
        Component::named("ftl"),
        AdversaryConfig::named("random"),
        20,
    );
    c.seed = 4;
    let s = stability(&c, StabilityMode::AllILoo, 64).unwrap();
    assert_eq!(s.rows.len(), 20);
    assert!(s.rows.iter().all(|r| r.std_error.is_some()));
    c.bound = Some("harmonic".into());
    assert_eq!(field_of(stability(&c, StabilityMode::AllILoo, 64).unwrap_err()), "bound");
}

#[test]
fn decomposition_matches_regret() {
    let mut c = ExperimentConfig::new(
        Component::named("absolute_1d"),
        Component::named("ftrl_abs"),
        AdversaryConfig::named("random"),
        60,
    );
    c.decompose = true;
    let art = run(&c).unwrap();
    let d = art.decomposition.unwrap();
    assert!((d.total - art.ledger.regret).abs() <= 1e-9 * 60.0);
    let text = run_json(&art);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 60);
    assert!(v["decomposition"]["drift"].is_number());
}

#[test]
fn config_errors_name_the_field() {
    let mut c = hedge_experts(2.0, 10, 0);
    c.rounds = 0;
    assert_eq!(field_of(run(&c).unwrap_err()), "rounds");
    let mut c = hedge_experts(2.0, 10, 0);
    c.rng = "mt19937".into();
    assert_eq!(field_of(run(&c).unwrap_err()), "rng");
    let mut c = hedge_experts(2.0, 10, 0);
    c.learner = Component::named("hedge").with("eta", 1.0);
    assert_eq!(field_of(run(&c).unwrap_err()), "learner.params.eta");
    let mut c = hedge_experts(2.0, 10, 0);
    c.problem = Component::named("finite_experts").with("d", 1.5);
    assert_eq!(field_of(run(&c).unwrap_err()), "problem.params.d");
    let mut c = hedge_experts(2.0, 10, 0);
    c.adversary = AdversaryConfig::named("tracking");
    assert_eq!(field_of(run(&c).unwrap_err()), "adversary.name");
    let mut c = hedge_experts(2.0, 10, 0);
    c.adversary = AdversaryConfig {
        name: "fixed".into(),
        sequence: Some(vec![json!([0.0, 1.0]), json!("x")]),
    };
    c.rounds = 2;
    assert_eq!(field_of(run(&c).unwrap_err()), "adversary.sequence[1]");
    c.rounds = 3;
    assert_eq!(field_of(run(&c).unwrap_err()), "adversary.sequence");
    let mut c = hedge_experts(2.0, 10, 0);
    c.bound = Some("harmonic".into());
    assert!(matches!(run(&c).unwrap_err(), HarnessError::BoundNotApplicable { .. }));
}

#[test]
fn json_configs_round_trip() {
    let text = r#"{
        "problem": {"name": "finite_experts", "params": {"d": 2, "B": 1}},
        "learner": {"name": "hedge"},
        "adversary": {"name": "random"},
        "rounds": 100,
        "seed": 7,
        "format": "json"
    }"#;
    let c = ExperimentConfig::from_json(text).unwrap();
    assert_eq!(c.rng, "chacha8");
    assert_eq!(c.format, Format::Json);
    let mut expected = hedge_experts(2.0, 100, 7);
    expected.format = Format::Json;
    assert_eq!(c, expected);
    let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
    assert!(matches!(
        ExperimentConfig::from_json(r#"{"problem": {"name": "x"}, "rounds": 1, "colour": 1}"#),
        Err(HarnessError::Json(_))
    ));
}

#[test]
fn threshold_runs_switch_to_exact_coordinates() {
    let short = resolve_problem(&Component::named("threshold_class"), 40).unwrap();
    assert!(matches!(short, AnyProblem::Threshold(_)));
    let long = resolve_problem(&Component::named("threshold_class"), 41).unwrap();
    assert!(matches!(long, AnyProblem::ThresholdExact(_)));
    let forced = resolve_problem(&Component::named("threshold_class").with("exact", 0.0), 100).unwrap();
    assert!(matches!(forced, AnyProblem::Threshold(_)));

    let art = run(&counterexample_config("threshold", 100, 0).unwrap()).unwrap();
    assert_eq!(art.ledger.average_regret, 1.0);
    let art = run(&counterexample_config("threshold_randomized", 60, 0).unwrap()).unwrap();
    assert!(art.ledger.per_round_loss.iter().all(|&l| l >= 0.5));
}

#[test]
fn sweep_rows_are_ordered_and_thread_independent() {
    let grid = SweepConfig {
        base: hedge_experts(5.0, 10, 9),
        rounds: vec![100, 1000, 10_000],
        learner_params: vec![],
    };
    let one = with_threads(Some(1), || sweep(&grid).unwrap());
    let four = with_threads(Some(4), || sweep(&grid).unwrap());
    assert_eq!(sweep_csv(&one), sweep_csv(&four));
    let avg: Vec<f64> = one.iter().map(|r| r.outcome.as_ref().unwrap().average_regret).collect();
    assert!(avg[0] > avg[1] && avg[1] > avg[2], "{avg:?}");
    assert_eq!(one.iter().map(|r| r.cell).collect::<Vec<_>>(), vec![0, 1, 2]);

    let single = SweepConfig {
        base: hedge_experts(5.0, 250, 9),
        rounds: vec![250],
        learner_params: vec![],
    };
    let row = &sweep(&single).unwrap()[0];
    let direct = run(&single.base).unwrap();
    assert_eq!(row.outcome.as_ref().unwrap().regret, direct.ledger.regret);
}

#[test]
fn sweep_checks_only_the_theorem_schedule() {
    let mut base = hedge_experts(4.0, 10, 5);
    base.bound = Some("hedge".into());
    let theorem_c = 1.0 / 8f64.sqrt();
    let grid = SweepConfig {
        base,
        rounds: vec![2000],
        learner_params: [0.1, 0.42, 1.0, theorem_c]
            .iter()
            .map(|&c| [("c".to_string(), c)].into_iter().collect())
            .collect(),
    };
    let rows = sweep(&grid).unwrap();
    for row in &rows[..3] {
        let o = row.outcome.as_ref().unwrap();
        assert_eq!((o.bound, o.bound_pass), (None, None));
    }
    assert_eq!(rows[3].outcome.as_ref().unwrap().bound_pass, Some(true));
}

#[test]
fn sweep_records_cell_failures() {
    let grid = SweepConfig {
        base: hedge_experts(2.0, 10, 0),
        rounds: vec![0, 5],
        learner_params: vec![],
    };
    let rows = sweep(&grid).unwrap();
    assert!(rows[0].outcome.as_ref().unwrap_err().contains("rounds"));
    assert!(rows[1].outcome.is_ok());
    let csv = sweep_csv(&rows);
    assert_eq!(csv.lines().count(), 3);
    assert!(SweepConfig { rounds: vec![], ..grid }.cells().is_err());
}

#[test]
fn rate_tables_by_name() {
    let t = rate_table("strongly_convex_loo", &[("L".to_string(), 1.0), ("nu".to_string(), 1.0)].into(), 2).unwrap();
    assert_eq!(rates_csv(&t), "m,epsilon\n1,2.0000000000000000e0\n2,1.0000000000000000e0\n");
    let h = rate_table("hedge_regret", &[("B".to_string(), 1.0), ("d".to_string(), 2.0)].into(), 4).unwrap();
    assert!((h.at(4) - 2.321350505322458).abs() < 1e-12);
    for name in stablab::rates::RATE_NAMES {
        let t = rate_table(name, &Default::default(), 200).unwrap();
        assert!(t.is_non_increasing(), "{name}");
        assert_eq!(t.len(), 200);
    }
    assert_eq!(field_of(rate_table("nope", &Default::default(), 3).unwrap_err()), "rate");
    assert_eq!(
        field_of(rate_table("hedge_loo", &[("L".to_string(), 1.0)].into(), 3).unwrap_err()),
        "rate.params.L"
    );
}

#[test]
fn covers_from_the_harness() {
    let c = cover(&Component::named("absolute_1d"), 0.01, None, 10_000, 0).unwrap();
    assert!(c.passed && c.size == 100);
    let r = cover(&Component::named("rationality_game"), 0.0, None, 1000, 0).unwrap();
    assert!(r.passed && r.size == 2);
    let bad = cover(&Component::named("absolute_1d"), 0.1, Some(0.25), 1000, 0).unwrap();
    assert!(!bad.passed && bad.witness.is_some());
    assert_eq!(field_of(cover(&Component::named("threshold_class"), 0.1, None, 10, 0).unwrap_err()), "problem.name");
}
