use std::collections::BTreeMap;

use super::{Absolute1d, BinaryGame, Dyadic, FiniteExperts, LossMetadata, Problem, Quadratic1d, RandomizedBinary, RationalityGame, ThresholdClass};
use crate::error::{invalid_param, Error, Result};

/// Numeric problem parameters keyed by name.
pub type Params = BTreeMap<String, f64>;

pub const CATALOG: &[&str] = &[
    "quadratic_1d",
    "absolute_1d",
    "binary_game",
    "randomized_binary",
    "threshold_class",
    "finite_experts",
    "rationality_game",
];

/// Any catalog problem, for callers that pick one by name at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyProblem {
    Quadratic1d(Quadratic1d),
    Absolute1d(Absolute1d),
    BinaryGame(BinaryGame),
    RandomizedBinary(RandomizedBinary),
    /// Threshold class with floating-point coordinates.
    Threshold(ThresholdClass<f64>),
    /// Threshold class with exact dyadic coordinates.
    ThresholdExact(ThresholdClass<Dyadic>),
    FiniteExperts(FiniteExperts),
    Rationality(RationalityGame),
}

impl AnyProblem {
    pub fn name(&self) -> &'static str {
        match self {
            AnyProblem::Quadratic1d(p) => p.name(),
            AnyProblem::Absolute1d(p) => p.name(),
            AnyProblem::BinaryGame(p) => p.name(),
            AnyProblem::RandomizedBinary(p) => p.name(),
            AnyProblem::Threshold(p) => p.name(),
            AnyProblem::ThresholdExact(p) => p.name(),
            AnyProblem::FiniteExperts(p) => p.name(),
            AnyProblem::Rationality(p) => p.name(),
        }
    }

    pub fn metadata(&self) -> LossMetadata {
        match self {
            AnyProblem::Quadratic1d(p) => p.metadata(),
            AnyProblem::Absolute1d(p) => p.metadata(),
            AnyProblem::BinaryGame(p) => p.metadata(),
            AnyProblem::RandomizedBinary(p) => p.metadata(),
            AnyProblem::Threshold(p) => p.metadata(),
            AnyProblem::ThresholdExact(p) => p.metadata(),
            AnyProblem::FiniteExperts(p) => p.metadata(),
            AnyProblem::Rationality(p) => p.metadata(),
        }
    }
}

fn check_keys(name: &str, params: &Params, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(invalid_param(k, format!("not a parameter of `{name}` (accepted: {})", allowed.join(", ")))),
        None => Ok(()),
    }
}

fn get(params: &Params, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn get_count(params: &Params, key: &str, default: usize) -> Result<usize> {
    match params.get(key) {
        None => Ok(default),
        Some(&v) if v >= 0.0 && v.fract() == 0.0 && v <= 1e9 => Ok(v as usize),
        Some(&v) => Err(invalid_param(key, format!("must be a non-negative integer, got {v}"))),
    }
}

/// Builds a catalog problem.
///
/// Parameters: `quadratic_1d{radius=1}`, `absolute_1d{k=1}`,
/// `threshold_class{exact=0}` (nonzero selects dyadic coordinates),
/// `finite_experts{d=2, B=1}`; the rest take none.
pub fn make_problem(name: &str, params: &Params) -> Result<AnyProblem> {
    match name {
        "quadratic_1d" => {
            check_keys(name, params, &["radius"])?;
            Ok(AnyProblem::Quadratic1d(Quadratic1d::new(get(params, "radius", 1.0))?))
        }
        "absolute_1d" => {
            check_keys(name, params, &["k"])?;
            Ok(AnyProblem::Absolute1d(Absolute1d::new(get(params, "k", 1.0))?))
        }
        "binary_game" => {
            check_keys(name, params, &[])?;
            Ok(AnyProblem::BinaryGame(BinaryGame))
        }
        "randomized_binary" => {
            check_keys(name, params, &[])?;
            Ok(AnyProblem::RandomizedBinary(RandomizedBinary))
        }
        "threshold_class" => {
            check_keys(name, params, &["exact"])?;
            if get(params, "exact", 0.0) != 0.0 {
                Ok(AnyProblem::ThresholdExact(ThresholdClass::new()))
            } else {
                Ok(AnyProblem::Threshold(ThresholdClass::new()))
            }
        }
        "finite_experts" => {
            check_keys(name, params, &["d", "B"])?;
            let d = get_count(params, "d", 2)?;
            Ok(AnyProblem::FiniteExperts(FiniteExperts::new(d, get(params, "B", 1.0))?))
        }
        "rationality_game" => {
            check_keys(name, params, &[])?;
            Ok(AnyProblem::Rationality(RationalityGame))
        }
        _ => Err(Error::UnknownProblem {
            name: name.to_string(),
            catalog: CATALOG.join(", "),
        }),
    }
}
