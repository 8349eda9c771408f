use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stablab_core::problems::CATALOG;

use crate::error::{config_err, HarnessError, Result};

pub type Params = BTreeMap<String, f64>;

/// The only generator the harness knows; named in configs so runs are
/// portable across implementations.
pub const RNG_ALGORITHM: &str = "chacha8";

pub const LEARNERS: &[&str] = &[
    "ftl",
    "ftrl",
    "ftrl_abs",
    "rslm",
    "rslm_exact",
    "hedge",
    "constant",
    "interval_rerm",
    "balanced_erm",
];

pub const ADVERSARIES: &[&str] = &[
    "random",
    "fixed",
    "greedy",
    "matching_pennies",
    "rounded_pennies",
    "tracking",
    "bisection",
];

/// Bounds a run or stability check can be held to.
pub const BOUNDS: &[&str] = &["hedge", "harmonic", "ftrl"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A named catalog entry with numeric parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

impl Component {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            params: Params::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    pub name: String,
    /// Points for the `fixed` source, in the problem's JSON point encoding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<serde_json::Value>>,
}

impl AdversaryConfig {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            sequence: None,
        }
    }
}

fn default_rng() -> String {
    RNG_ALGORITHM.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Component,
    pub learner: Component,
    pub adversary: AdversaryConfig,
    pub rounds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rng")]
    pub rng: String,
    /// Theoretical average-regret curve to check every round against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    /// Also compute the stability / AERM / drift split of the final regret.
    #[serde(default)]
    pub decompose: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(problem: Component, learner: Component, adversary: AdversaryConfig, rounds: usize) -> Self {
        Self {
            problem,
            learner,
            adversary,
            rounds,
            seed: 0,
            rng: default_rng(),
            bound: None,
            decompose: false,
            out: None,
            format: Format::Csv,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Name-level checks; parameter values are checked when the run is wired.
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(config_err("rounds", "must be at least 1"));
        }
        if self.rng != RNG_ALGORITHM {
            return Err(config_err("rng", format!("unknown generator `{}` (supported: {RNG_ALGORITHM})", self.rng)));
        }
        known("problem.name", &self.problem.name, CATALOG)?;
        known("learner.name", &self.learner.name, LEARNERS)?;
        known("adversary.name", &self.adversary.name, ADVERSARIES)?;
        if let Some(b) = &self.bound {
            known("bound", b, BOUNDS)?;
        }
        match (&self.adversary.name[..], &self.adversary.sequence) {
            ("fixed", None) => Err(config_err("adversary.sequence", "the fixed source needs a sequence")),
            ("fixed", Some(s)) if s.len() < self.rounds => Err(config_err(
                "adversary.sequence",
                format!("has {} points but rounds = {}", s.len(), self.rounds),
            )),
            (name, Some(_)) if name != "fixed" => {
                Err(config_err("adversary.sequence", format!("only the fixed source takes a sequence, not `{name}`")))
            }
            _ => Ok(()),
        }
    }
}

pub(crate) fn known(field: &str, name: &str, catalog: &[&str]) -> Result<()> {
    if catalog.contains(&name) {
        Ok(())
    } else {
        Err(config_err(field, format!("unknown name `{name}` (known: {})", catalog.join(", "))))
    }
}

/// Typed access to a component's parameters, reporting errors by field path.
pub(crate) struct ParamReader<'a> {
    scope: &'static str,
    name: &'a str,
    params: &'a Params,
}

impl<'a> ParamReader<'a> {
    pub fn new(scope: &'static str, component: &'a Component) -> Self {
        Self {
            scope,
            name: &component.name,
            params: &component.params,
        }
    }

    pub fn field(&self, key: &str) -> String {
        format!("{}.params.{key}", self.scope)
    }

    pub fn allow(&self, keys: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => {
                let accepted = if keys.is_empty() { "none".to_string() } else { keys.join(", ") };
                Err(config_err(self.field(k), format!("not a parameter of `{}` (accepted: {accepted})", self.name)))
            }
            None => Ok(()),
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) if v > 0.0 && v.is_finite() => Ok(v),
            Some(v) => Err(config_err(self.field(key), format!("must be positive, got {v}"))),
        }
    }

    pub fn optional_positive(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|_| self.positive(key, 1.0)).transpose()
    }

    pub fn count(&self, key: &str, default: usize, max: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= max as f64 => Ok(v as usize),
            Some(v) => Err(config_err(self.field(key), format!("must be an integer in [0, {max}], got {v}"))),
        }
    }
}
