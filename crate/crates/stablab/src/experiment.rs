//! Runs an experiment config end to end.

use serde::Serialize;
use stablab_core::covering::{finite_cover, grid_cover, rationality_cover, verify_cover, Cover};
use stablab_core::problems::{make_problem, AnyProblem, Problem, ScalarProblem};
use stablab_core::stability::{all_i_loo_estimate, online_stability_gap, uniform_loo_gap};
use stablab_core::{decompose_regret, run_online, DecompositionReport, Error, Learner, RegretLedger};

use crate::bounds::{check_at, check_ledger, loo_table, regret_table, BoundCheckResult};
use crate::config::{known, AdversaryConfig, Component, ExperimentConfig};
use crate::error::{config_err, HarnessError, Result};
use crate::wiring::Wire;

/// Float threshold runs switch to dyadic coordinates past this many rounds.
pub const FLOAT_THRESHOLD_ROUNDS: usize = 40;

macro_rules! dispatch {
    ($problem:expr, |$p:ident| $body:expr) => {
        match $problem {
            AnyProblem::Quadratic1d($p) => $body,
            AnyProblem::Absolute1d($p) => $body,
            AnyProblem::BinaryGame($p) => $body,
            AnyProblem::RandomizedBinary($p) => $body,
            AnyProblem::Threshold($p) => $body,
            AnyProblem::ThresholdExact($p) => $body,
            AnyProblem::FiniteExperts($p) => $body,
            AnyProblem::Rationality($p) => $body,
        }
    };
}

/// Builds the catalog problem, naming the offending field on failure.
pub fn resolve_problem(component: &Component, rounds: usize) -> Result<AnyProblem> {
    known("problem.name", &component.name, stablab_core::problems::CATALOG)?;
    let mut params = component.params.clone();
    if component.name == "threshold_class" && rounds > FLOAT_THRESHOLD_ROUNDS {
        params.entry("exact".into()).or_insert(1.0);
    }
    make_problem(&component.name, &params).map_err(|e| match e {
        Error::InvalidParameter { name, detail } => config_err(format!("problem.params.{name}"), detail),
        other => other.into(),
    })
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub config: ExperimentConfig,
    pub learner: String,
    pub ledger: RegretLedger,
    pub decomposition: Option<DecompositionReport>,
    pub bound_check: Option<BoundCheckResult>,
}

impl RunArtifacts {
    /// False only when a requested bound check failed.
    pub fn passed(&self) -> bool {
        self.bound_check.as_ref().is_none_or(|b| b.pass)
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let problem = resolve_problem(&config.problem, config.rounds)?;
    dispatch!(&problem, |p| run_with(p, config))
}

fn run_with<P: Wire>(problem: &P, config: &ExperimentConfig) -> Result<RunArtifacts> {
    let wired = problem.learner(&config.learner, config.rounds)?;
    let mut adversary = problem.adversary(&config.adversary, config.seed)?;
    let run = run_online(&wired.learner, &mut adversary, problem, config.rounds)?;
    let decomposition = match config.decompose {
        true => Some(decompose_regret(&wired.learner, problem, &run.points)?),
        false => None,
    };
    let bound_check = match &config.bound {
        Some(bound) => {
            let table = regret_table(bound, &problem.metadata(), &wired.kind, config.rounds)?;
            Some(check_ledger(&run.ledger, &table, 0.0)?)
        }
        None => None,
    };
    Ok(RunArtifacts {
        config: config.clone(),
        learner: wired.learner.name(),
        ledger: run.ledger,
        decomposition,
        bound_check,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityMode {
    /// Largest deletion gap on each prefix of the generated sequence.
    UniformLoo,
    /// Gap on the last point of each prefix.
    Online,
    /// Monte-Carlo deletion gap per index on i.i.d. samples.
    AllILoo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    /// Prefix length, or the deleted index for all-i-LOO.
    pub m: usize,
    pub gap: f64,
    pub std_error: Option<f64>,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityArtifacts {
    pub mode: StabilityMode,
    pub learner: String,
    pub rows: Vec<StabilityRow>,
    pub bound_check: Option<BoundCheckResult>,
}

impl StabilityArtifacts {
    pub fn passed(&self) -> bool {
        self.bound_check.as_ref().is_none_or(|b| b.pass)
    }
}

/// `1, 2, 5, 10, 20, 50, …` up to `m`, always ending with `m`.
pub fn prefix_grid(m: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut scale = 1usize;
    'outer: loop {
        for k in [1, 2, 5] {
            match scale.checked_mul(k) {
                Some(v) if v < m => grid.push(v),
                _ => break 'outer,
            }
        }
        scale = match scale.checked_mul(10) {
            Some(s) => s,
            None => break,
        };
    }
    grid.push(m);
    grid
}

/// Stability gaps of the configured learner. Prefix modes use the
/// adversary's sequence; all-i-LOO draws `samples` i.i.d. datasets of size
/// `rounds` from the problem's instance sampler.
pub fn stability(config: &ExperimentConfig, mode: StabilityMode, samples: usize) -> Result<StabilityArtifacts> {
    config.validate()?;
    let problem = resolve_problem(&config.problem, config.rounds)?;
    dispatch!(&problem, |p| stability_with(p, config, mode, samples))
}

fn stability_with<P: Wire>(problem: &P, config: &ExperimentConfig, mode: StabilityMode, samples: usize) -> Result<StabilityArtifacts> {
    let wired = problem.learner(&config.learner, config.rounds)?;
    let learner = &wired.learner;
    let mut rows = Vec::new();
    match mode {
        StabilityMode::UniformLoo | StabilityMode::Online => {
            let mut adversary = problem.adversary(&config.adversary, config.seed)?;
            let points = run_online(learner, &mut adversary, problem, config.rounds)?.points;
            for m in prefix_grid(config.rounds) {
                let gap = match mode {
                    StabilityMode::UniformLoo => uniform_loo_gap(learner, problem, &points[..m])?.max_gap,
                    _ => online_stability_gap(learner, problem, &points[..m])?,
                };
                rows.push(StabilityRow {
                    m,
                    gap,
                    std_error: None,
                    bound: None,
                });
            }
        }
        StabilityMode::AllILoo => {
            if samples == 0 {
                return Err(config_err("samples", "must be at least 1"));
            }
            let sampler = |rng: &mut dyn rand::RngCore| problem.sample_point(rng);
            let report = all_i_loo_estimate(learner, problem, sampler, config.rounds, samples, config.seed)?;
            for (i, (&gap, &se)) in report.gaps.iter().zip(&report.std_errors).enumerate() {
                rows.push(StabilityRow {
                    m: i + 1,
                    gap,
                    std_error: Some(se),
                    bound: None,
                });
            }
        }
    }
    let bound_check = match (&config.bound, mode) {
        (Some(_), StabilityMode::AllILoo) => {
            return Err(config_err("bound", "all-i-LOO estimates are not checked against a table"));
        }
        (Some(bound), _) => {
            let table = loo_table(bound, &problem.metadata(), &wired.kind, config.rounds)?;
            let check = check_at(&rows.iter().map(|r| (r.m, r.gap)).collect::<Vec<_>>(), &table, 0.0)?;
            for (row, &(_, _, theory)) in rows.iter_mut().zip(&check.points) {
                row.bound = Some(theory);
            }
            Some(check)
        }
        (None, _) => None,
    };
    Ok(StabilityArtifacts {
        mode,
        learner: learner.name(),
        rows,
        bound_check,
    })
}

pub const COUNTEREXAMPLES: &[&str] = &["matching_pennies", "rounded_pennies", "tracking", "threshold", "threshold_randomized"];

/// The canonical learner/adversary pairing for each lower-bound construction.
pub fn counterexample_config(name: &str, rounds: usize, seed: u64) -> Result<ExperimentConfig> {
    known("counterexample", name, COUNTEREXAMPLES)?;
    let (problem, learner, adversary) = match name {
        "matching_pennies" => (Component::named("binary_game"), Component::named("ftl"), "matching_pennies"),
        "rounded_pennies" => (Component::named("randomized_binary"), Component::named("balanced_erm"), "rounded_pennies"),
        "tracking" => (Component::named("randomized_binary"), Component::named("interval_rerm"), "tracking"),
        "threshold" => (Component::named("threshold_class"), Component::named("ftl"), "bisection"),
        _ => (
            Component::named("threshold_class").with("exact", 1.0),
            Component::named("hedge").with("bits", 6.0),
            "bisection",
        ),
    };
    let mut config = ExperimentConfig::new(problem, learner, AdversaryConfig::named(adversary), rounds);
    config.seed = seed;
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverArtifacts {
    pub problem: String,
    pub size: usize,
    pub epsilon: f64,
    pub probes: usize,
    pub worst_gap: f64,
    pub worst_slack: f64,
    pub passed: bool,
    /// `(h′, z)` that no member approximates within ε, if any.
    pub witness: Option<String>,
}

fn verify<P: Problem>(problem: &P, cover: Cover<P::Hypothesis>, probes: usize, seed: u64) -> Result<CoverArtifacts> {
    let report = verify_cover(&cover, problem, probes, seed)?;
    Ok(CoverArtifacts {
        problem: problem.name().to_string(),
        size: cover.len(),
        epsilon: cover.epsilon,
        probes,
        worst_gap: report.worst_gap,
        worst_slack: report.worst_slack,
        passed: report.passed,
        witness: report.witness.map(|(h, z)| format!("h={h:?} z={z:?}")),
    })
}

fn scalar_cover<P: ScalarProblem>(problem: &P, eps: f64, lipschitz: Option<f64>, probes: usize, seed: u64) -> Result<CoverArtifacts> {
    let k = lipschitz
        .or(problem.metadata().lipschitz)
        .ok_or_else(|| config_err("problem.name", format!("`{}` has no Lipschitz constant", problem.name())))?;
    let (lo, hi) = problem.interval();
    verify(problem, grid_cover(lo, hi, k, eps)?, probes, seed)
}

/// Builds the problem's standard cover (Lipschitz grid, finite class, or
/// the two-point rationality cover) and probes it. `lipschitz` overrides the
/// constant the grid spacing is derived from.
pub fn cover(component: &Component, eps: f64, lipschitz: Option<f64>, probes: usize, seed: u64) -> Result<CoverArtifacts> {
    if probes == 0 {
        return Err(config_err("probes", "must be at least 1"));
    }
    match resolve_problem(component, 0)? {
        AnyProblem::Quadratic1d(p) => scalar_cover(&p, eps, lipschitz, probes, seed),
        AnyProblem::Absolute1d(p) => scalar_cover(&p, eps, lipschitz, probes, seed),
        AnyProblem::RandomizedBinary(p) => scalar_cover(&p, eps, lipschitz, probes, seed),
        AnyProblem::BinaryGame(p) => verify(&p, finite_cover(&p)?, probes, seed),
        AnyProblem::FiniteExperts(p) => verify(&p, finite_cover(&p)?, probes, seed),
        AnyProblem::Rationality(p) => verify(&p, rationality_cover(), probes, seed),
        AnyProblem::Threshold(_) | AnyProblem::ThresholdExact(_) => Err(HarnessError::Config {
            field: "problem.name".into(),
            detail: "threshold losses are not Lipschitz in the threshold, so no finite cover exists".into(),
        }),
    }
}
