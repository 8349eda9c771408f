//! Grids of independent runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Params};
use crate::error::{config_err, HarnessError, Result};
use crate::experiment::run;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub rounds: Vec<usize>,
    /// Learner parameter sets; each replaces the base learner's parameters.
    /// Empty means the base parameters only.
    #[serde(default)]
    pub learner_params: Vec<Params>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Cells in lexicographic order of `(rounds index, params index)`.
    pub fn cells(&self) -> Result<Vec<ExperimentConfig>> {
        if self.rounds.is_empty() {
            return Err(config_err("rounds", "the grid needs at least one value"));
        }
        let params = match self.learner_params.is_empty() {
            true => vec![self.base.learner.params.clone()],
            false => self.learner_params.clone(),
        };
        Ok(self
            .rounds
            .iter()
            .flat_map(|&m| {
                params.iter().map(move |p| {
                    let mut cell = self.base.clone();
                    cell.rounds = m;
                    cell.learner.params = p.clone();
                    cell
                })
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellOutcome {
    pub regret: f64,
    pub average_regret: f64,
    /// The bound at the final round, when it applies to this cell.
    pub bound: Option<f64>,
    pub bound_pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub cell: usize,
    pub rounds: usize,
    pub learner_params: Params,
    pub outcome: Result<CellOutcome, String>,
}

impl SweepRow {
    pub fn bound_failed(&self) -> bool {
        matches!(&self.outcome, Ok(CellOutcome { bound_pass: Some(false), .. }))
    }
}

/// A bound that does not apply to a cell (for example Hedge with a
/// non-theorem schedule constant) is dropped for that cell only.
fn run_cell(config: &ExperimentConfig) -> Result<CellOutcome> {
    let artifacts = match run(config) {
        Err(HarnessError::BoundNotApplicable { .. }) => {
            let mut plain = config.clone();
            plain.bound = None;
            run(&plain)?
        }
        other => other?,
    };
    let check = artifacts.bound_check.as_ref();
    Ok(CellOutcome {
        regret: artifacts.ledger.regret,
        average_regret: artifacts.ledger.average_regret,
        bound: check.map(|b| b.points.last().expect("m ≥ 1").2),
        bound_pass: check.map(|b| b.pass),
    })
}

/// Runs every cell, in parallel on the current rayon pool. Row order is the
/// cell order; a failing cell records its error and the sweep continues.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let cells = config.cells()?;
    Ok(cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| SweepRow {
            cell: i,
            rounds: cell.rounds,
            learner_params: cell.learner.params.clone(),
            outcome: run_cell(cell).map_err(|e| e.to_string()),
        })
        .collect())
}
