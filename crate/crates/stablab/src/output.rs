//! CSV and JSON rendering. Every rendering ends with a newline.

use serde_json::{json, Value};

use crate::experiment::{CoverArtifacts, RunArtifacts, StabilityArtifacts, StabilityMode};
use crate::sweep::SweepRow;

/// 17 significant digits, locale independent, round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// `round,loss,cum_loss,hindsight,regret,avg_regret[,bound]`.
pub fn ledger_csv(run: &RunArtifacts) -> String {
    let l = &run.ledger;
    let bound = run.bound_check.as_ref();
    let mut out = String::from("round,loss,cum_loss,hindsight,regret,avg_regret");
    if bound.is_some() {
        out.push_str(",bound");
    }
    out.push('\n');
    for t in 1..=l.rounds() {
        let regret = l.regret_at(t);
        out.push_str(&format!(
            "{t},{},{},{},{},{}",
            fmt_f64(l.per_round_loss[t - 1]),
            fmt_f64(l.cumulative[t - 1]),
            fmt_f64(l.hindsight[t - 1]),
            fmt_f64(regret),
            fmt_f64(regret / t as f64),
        ));
        if let Some(b) = bound {
            out.push_str(&format!(",{}", fmt_f64(b.points[t - 1].2)));
        }
        out.push('\n');
    }
    out
}

pub fn run_json(run: &RunArtifacts) -> String {
    let l = &run.ledger;
    let rows: Vec<Value> = (1..=l.rounds())
        .map(|t| {
            let regret = l.regret_at(t);
            let mut row = json!({
                "round": t,
                "loss": l.per_round_loss[t - 1],
                "cum_loss": l.cumulative[t - 1],
                "hindsight": l.hindsight[t - 1],
                "regret": regret,
                "avg_regret": regret / t as f64,
            });
            if let Some(b) = &run.bound_check {
                row["bound"] = json!(b.points[t - 1].2);
            }
            row
        })
        .collect();
    pretty(&json!({
        "config": run.config,
        "learner": run.learner,
        "summary": {
            "cumulative_loss": l.cumulative_loss,
            "best_in_hindsight": l.best_in_hindsight,
            "regret": l.regret,
            "average_regret": l.average_regret,
        },
        "decomposition": run.decomposition.map(|d| json!({
            "stability": d.stability_term,
            "aerm": d.aerm_term,
            "drift": d.drift_term,
            "total": d.total,
            "regret": d.regret,
        })),
        "bound_check": run.bound_check.as_ref().map(|b| json!({
            "bound": b.bound,
            "max_violation": b.max_violation,
            "worst_round": b.worst_m,
            "pass": b.pass,
        })),
        "rows": rows,
    }))
}

pub fn stability_csv(s: &StabilityArtifacts) -> String {
    let mut out = String::new();
    if s.mode == StabilityMode::AllILoo {
        out.push_str("index,gap,std_error\n");
        for r in &s.rows {
            out.push_str(&format!("{},{},{}\n", r.m, fmt_f64(r.gap), opt(r.std_error)));
        }
        return out;
    }
    out.push_str("m,gap");
    if s.bound_check.is_some() {
        out.push_str(",bound");
    }
    out.push('\n');
    for r in &s.rows {
        out.push_str(&format!("{},{}", r.m, fmt_f64(r.gap)));
        if s.bound_check.is_some() {
            out.push_str(&format!(",{}", opt(r.bound)));
        }
        out.push('\n');
    }
    out
}

pub fn stability_json(s: &StabilityArtifacts) -> String {
    pretty(&serde_json::to_value(s).expect("stability artifacts serialize"))
}

pub fn cover_csv(c: &CoverArtifacts) -> String {
    format!(
        "problem,size,epsilon,probes,worst_gap,worst_slack,passed,witness\n{},{},{},{},{},{},{},{}\n",
        c.problem,
        c.size,
        fmt_f64(c.epsilon),
        c.probes,
        fmt_f64(c.worst_gap),
        fmt_f64(c.worst_slack),
        c.passed,
        c.witness.as_deref().unwrap_or_default().replace(',', ";"),
    )
}

pub fn cover_json(c: &CoverArtifacts) -> String {
    pretty(&serde_json::to_value(c).expect("cover artifacts serialize"))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("cell,rounds,learner_params,regret,avg_regret,bound,bound_pass,error\n");
    for r in rows {
        let params: Vec<String> = r.learner_params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("{},{},{},", r.cell, r.rounds, params.join(";")));
        match &r.outcome {
            Ok(o) => out.push_str(&format!(
                "{},{},{},{},\n",
                fmt_f64(o.regret),
                fmt_f64(o.average_regret),
                opt(o.bound),
                o.bound_pass.map(|b| b.to_string()).unwrap_or_default(),
            )),
            Err(e) => out.push_str(&format!(",,,,{}\n", e.replace([',', '\n'], " "))),
        }
    }
    out
}

pub fn sweep_json(rows: &[SweepRow]) -> String {
    pretty(&serde_json::to_value(rows).expect("sweep rows serialize"))
}
