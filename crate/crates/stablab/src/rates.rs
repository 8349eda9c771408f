//! Rate tables by name, for the `rates` subcommand.

use stablab_core::stability::{
    rate_hedge, rate_loo_bounded_reg, rate_loo_convex_reg, rate_loo_strongly_convex_loss, rate_regret_rerm, RateTable,
};

use crate::config::{known, Component, ParamReader};
use crate::error::{config_err, Result};
use crate::output::fmt_f64;

pub const RATE_NAMES: &[&str] = &[
    "strongly_convex_loo",
    "harmonic_regret",
    "convex_reg_loo",
    "bounded_reg_loo",
    "rerm_regret",
    "hedge_loo",
    "hedge_erm",
    "hedge_regret",
];

/// Tabulates `name` for `m = 1..=max_m`.
///
/// The regularized families use `r_i(h) = λ_i h²` on `[−R, R]` with
/// `λ_i = c/√max(1, i)`, so `ν_i = 2λ_i`, `ρ_i = λ_i R²` and `L_R[i] = 2λ_i R`.
pub fn rate_table(name: &str, params: &crate::config::Params, max_m: usize) -> Result<RateTable> {
    known("rate", name, RATE_NAMES)?;
    if max_m == 0 {
        return Err(config_err("max_m", "must be at least 1"));
    }
    let component = Component {
        name: name.to_string(),
        params: params.clone(),
    };
    let r = ParamReader::new("rate", &component);
    let lambda = |c: f64| move |i: usize| c / (i.max(1) as f64).sqrt();
    Ok(match name {
        "strongly_convex_loo" | "harmonic_regret" => {
            r.allow(&["L", "nu"])?;
            let loo = rate_loo_strongly_convex_loss(r.positive("L", 1.0)?, r.positive("nu", 1.0)?, max_m)?;
            if name == "harmonic_regret" {
                rate_regret_rerm(&loo, &|_| 0.0, max_m)?
            } else {
                loo
            }
        }
        "convex_reg_loo" | "bounded_reg_loo" | "rerm_regret" => {
            r.allow(&["L", "c", "R"])?;
            let (l, c, radius) = (r.positive("L", 1.0)?, r.positive("c", 1.0)?, r.positive("R", 1.0)?);
            let lam = lambda(c);
            let nu = |i| 2.0 * lam(i);
            let rho = |i| lam(i) * radius * radius;
            match name {
                "convex_reg_loo" => rate_loo_convex_reg(l, &|i| 2.0 * lam(i) * radius, &nu, max_m)?,
                "bounded_reg_loo" => rate_loo_bounded_reg(l, &rho, &nu, max_m)?,
                _ => rate_regret_rerm(&rate_loo_bounded_reg(l, &rho, &nu, max_m)?, &rho, max_m)?,
            }
        }
        _ => {
            r.allow(&["B", "d"])?;
            let d = r.count("d", 2, 1 << 40)?;
            let rates = rate_hedge(r.positive("B", 1.0)?, d, max_m)?;
            match name {
                "hedge_loo" => rates.loo,
                "hedge_erm" => rates.erm,
                _ => rates.regret,
            }
        }
    })
}

/// Two columns, `m` and `epsilon`.
pub fn rates_csv(table: &RateTable) -> String {
    let mut out = String::from("m,epsilon\n");
    for (i, v) in table.values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, fmt_f64(*v)));
    }
    out
}
