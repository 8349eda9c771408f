use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use stablab::config::{AdversaryConfig, Component, ExperimentConfig, Format, Params};
use stablab::experiment::{counterexample_config, cover, run, stability, StabilityMode};
use stablab::{output, rate_table, rates_csv, sweep, threads_from_env, with_threads, HarnessError, SweepConfig};

/// Regret, stability and covering experiments for online learners.
#[derive(Parser)]
#[command(name = "stablab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play an online game and write the regret ledger.
    Run(RunArgs),
    /// Measure stability gaps of a learner.
    Stability {
        #[command(flatten)]
        common: RunArgs,
        #[arg(long, value_enum, default_value = "uniform-loo")]
        kind: StabilityMode,
        /// Monte-Carlo datasets for all-i-loo.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Replay one of the lower-bound constructions.
    Counterexample {
        /// matching_pennies, rounded_pennies, tracking, threshold, threshold_randomized
        name: String,
        #[arg(long, default_value_t = 1000)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        sink: Sink,
    },
    /// Build a problem's standard ε-cover and probe it.
    Cover {
        #[arg(long)]
        problem: String,
        #[arg(long = "problem-param", value_parser = parse_kv)]
        problem_params: Vec<(String, f64)>,
        /// Cover radius; defaults to 1/√rounds.
        #[arg(long)]
        eps: Option<f64>,
        /// Lipschitz constant for the grid spacing; defaults to the loss's own.
        #[arg(long)]
        lipschitz: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        rounds: usize,
        #[arg(long, default_value_t = 10_000)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        sink: Sink,
    },
    /// Tabulate a theoretical rate as `m,epsilon` CSV.
    Rates {
        name: String,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
        #[arg(long = "max-m", default_value_t = 100)]
        max_m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a grid of configs; one row per cell.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        sink: Sink,
    },
}

#[derive(Args)]
struct Sink {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long = "problem-param", value_parser = parse_kv)]
    problem_params: Vec<(String, f64)>,
    #[arg(long)]
    learner: Option<String>,
    #[arg(long = "learner-param", value_parser = parse_kv)]
    learner_params: Vec<(String, f64)>,
    #[arg(long)]
    adversary: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// hedge, harmonic or ftrl
    #[arg(long)]
    bound: Option<String>,
    #[arg(long)]
    decompose: bool,
    #[command(flatten)]
    sink: Sink,
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v = v.trim().parse::<f64>().map_err(|e| format!("`{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn params(kv: &[(String, f64)]) -> Params {
    kv.iter().cloned().collect()
}

fn missing(field: &str) -> HarnessError {
    HarnessError::Config {
        field: field.into(),
        detail: "required without --config".into(),
    }
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::new(
                Component::named(self.problem.as_deref().ok_or_else(|| missing("problem"))?),
                Component::named(self.learner.as_deref().ok_or_else(|| missing("learner"))?),
                AdversaryConfig::named("random"),
                100,
            ),
        };
        if let Some(p) = &self.problem {
            config.problem.name.clone_from(p);
        }
        config.problem.params.extend(params(&self.problem_params));
        if let Some(l) = &self.learner {
            config.learner.name.clone_from(l);
        }
        config.learner.params.extend(params(&self.learner_params));
        if let Some(a) = &self.adversary {
            config.adversary = AdversaryConfig::named(a);
        }
        if let Some(m) = self.rounds {
            config.rounds = m;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if self.bound.is_some() {
            config.bound.clone_from(&self.bound);
        }
        config.decompose |= self.decompose;
        if self.sink.out.is_some() {
            config.out.clone_from(&self.sink.out);
        }
        if let Some(f) = self.sink.format {
            config.format = f;
        }
        Ok(config)
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Exit status plus rendered output.
type Outcome = Result<(bool, String, Option<PathBuf>), HarnessError>;

fn execute(command: Command) -> Outcome {
    match command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let artifacts = run(&config)?;
            let text = match config.format {
                Format::Csv => output::ledger_csv(&artifacts),
                Format::Json => output::run_json(&artifacts),
            };
            if let Some(d) = &artifacts.decomposition {
                eprintln!(
                    "decomposition: stability={:e} aerm={:e} drift={:e} total={:e} regret={:e}",
                    d.stability_term, d.aerm_term, d.drift_term, d.total, d.regret
                );
            }
            Ok((artifacts.passed(), text, config.out))
        }
        Command::Stability { common, kind, samples } => {
            let config = common.resolve()?;
            let artifacts = stability(&config, kind, samples)?;
            let text = match config.format {
                Format::Csv => output::stability_csv(&artifacts),
                Format::Json => output::stability_json(&artifacts),
            };
            Ok((artifacts.passed(), text, config.out))
        }
        Command::Counterexample { name, rounds, seed, sink } => {
            let config = counterexample_config(&name, rounds, seed)?;
            let artifacts = run(&config)?;
            let text = match sink.format.unwrap_or_default() {
                Format::Csv => output::ledger_csv(&artifacts),
                Format::Json => output::run_json(&artifacts),
            };
            Ok((true, text, sink.out))
        }
        Command::Cover {
            problem,
            problem_params,
            eps,
            lipschitz,
            rounds,
            probes,
            seed,
            sink,
        } => {
            let component = Component {
                name: problem,
                params: params(&problem_params),
            };
            let eps = eps.unwrap_or(1.0 / (rounds.max(1) as f64).sqrt());
            let artifacts = cover(&component, eps, lipschitz, probes, seed)?;
            let text = match sink.format.unwrap_or_default() {
                Format::Csv => output::cover_csv(&artifacts),
                Format::Json => output::cover_json(&artifacts),
            };
            Ok((artifacts.passed, text, sink.out))
        }
        Command::Rates { name, params: kv, max_m, out } => {
            let table = rate_table(&name, &params(&kv), max_m)?;
            Ok((true, rates_csv(&table), out))
        }
        Command::Sweep { config, sink } => {
            let text = std::fs::read_to_string(&config).map_err(|source| HarnessError::Io { path: config, source })?;
            let grid = SweepConfig::from_json(&text)?;
            let rows = sweep(&grid)?;
            let text = match sink.format.unwrap_or(grid.base.format) {
                Format::Csv => output::sweep_csv(&rows),
                Format::Json => output::sweep_json(&rows),
            };
            Ok((!rows.iter().any(|r| r.bound_failed()), text, sink.out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match with_threads(threads, || execute(cli.command)) {
        Ok((passed, text, out)) => {
            if let Err(e) = emit(&text, out.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
