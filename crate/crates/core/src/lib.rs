//! Regret, stability and covering toolkit for online learning with
//! empirical-risk-style learners.

pub mod counterexamples;
pub mod covering;
pub mod dataset;
pub mod error;
pub mod learners;
pub mod objective;
pub mod problems;
pub mod regret;
pub mod sources;
pub mod stability;
pub mod sum;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use learners::{Learner, Play, Session};
pub use problems::{AnyProblem, Problem, ScalarProblem};
pub use regret::{decompose_regret, run_online, DecompositionReport, OnlineRun, RegretLedger};
pub use sources::Adversary;
