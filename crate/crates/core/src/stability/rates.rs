use serde::Serialize;

use crate::error::{invalid_param, Error, Result};
use crate::sum::CompensatedSum;

/// `ε(m)` for `m = 1..=M`, with the constants that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    pub name: String,
    /// `values[m − 1] = ε(m)`.
    pub values: Vec<f64>,
    pub params: Vec<(String, f64)>,
}

impl RateTable {
    fn build(name: &str, params: &[(&str, f64)], max_m: usize, eps: impl FnMut(usize) -> f64) -> Self {
        Self {
            name: name.to_string(),
            values: (1..=max_m).map(eps).collect(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// `ε(m)`, for `1 ≤ m ≤ M`.
    pub fn at(&self, m: usize) -> f64 {
        self.values[m - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `ε(m) ≥ ε(m+1)` for every tabulated `m`.
    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// Every table scaled by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            name: self.name.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            params: self.params.clone(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid_param(name, format!("must be positive and finite, got {v}")))
    }
}

/// Running `Σ_{j=0}^{m} seq(j)` for `m = 0..=max_m`.
fn prefix_sums(seq: &dyn Fn(usize) -> f64, max_m: usize) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    (0..=max_m)
        .map(|j| {
            acc.add(seq(j));
            acc.value()
        })
        .collect()
}

/// `ε(m) = 2L²/(mν)` for a `ν`-strongly convex, `L`-Lipschitz loss.
pub fn rate_loo_strongly_convex_loss(lipschitz: f64, nu: f64, max_m: usize) -> Result<RateTable> {
    positive("L", lipschitz)?;
    positive("nu", nu)?;
    Ok(RateTable::build(
        "loo_strongly_convex_loss",
        &[("L", lipschitz), ("nu", nu)],
        max_m,
        |m| 2.0 * lipschitz * lipschitz / (m as f64 * nu),
    ))
}

/// `ε(m) = 2L(L + L_R[m]) / Σ_{i=0}^{m} ν_i` for a convex loss with
/// `ν_i`-strongly convex, `L_R[i]`-Lipschitz regularizers.
pub fn rate_loo_convex_reg(
    lipschitz: f64,
    reg_lipschitz: &dyn Fn(usize) -> f64,
    nu: &dyn Fn(usize) -> f64,
    max_m: usize,
) -> Result<RateTable> {
    positive("L", lipschitz)?;
    let nu_sums = prefix_sums(nu, max_m);
    Ok(RateTable::build("loo_convex_reg", &[("L", lipschitz)], max_m, |m| {
        2.0 * lipschitz * (lipschitz + reg_lipschitz(m)) / nu_sums[m]
    }))
}

/// `ε(m) = 2L²/Σ_{j=0}^{m} ν_j + L·√(2ρ_m / Σ_{j=0}^{m} ν_j)` for a convex
/// loss with strongly convex regularizers of range `ρ_j`.
pub fn rate_loo_bounded_reg(lipschitz: f64, rho: &dyn Fn(usize) -> f64, nu: &dyn Fn(usize) -> f64, max_m: usize) -> Result<RateTable> {
    positive("L", lipschitz)?;
    let nu_sums = prefix_sums(nu, max_m);
    Ok(RateTable::build("loo_bounded_reg", &[("L", lipschitz)], max_m, |m| {
        let s = nu_sums[m];
        2.0 * lipschitz * lipschitz / s + lipschitz * (2.0 * rho(m) / s).sqrt()
    }))
}

/// `ε_regret(m) = (1/m) Σ_{i=1}^{m} ε_on(i) + (2/m) Σ_{i=0}^{m−1} ρ_i + ρ_m/m`
/// for an online-stable RERM.
pub fn rate_regret_rerm(stability: &RateTable, rho: &dyn Fn(usize) -> f64, max_m: usize) -> Result<RateTable> {
    if stability.len() < max_m {
        return Err(Error::LengthMismatch {
            expected: max_m,
            actual: stability.len(),
        });
    }
    let mut on = CompensatedSum::new();
    let mut rho_sum = CompensatedSum::new();
    Ok(RateTable::build("regret_rerm", &[], max_m, |m| {
        on.add(stability.at(m));
        rho_sum.add(rho(m - 1));
        let mf = m as f64;
        on.value() / mf + 2.0 * rho_sum.value() / mf + rho(m) / mf
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AermCase {
    /// Always-AERM and online stable.
    OnlineStable,
    /// Always-AERM, symmetric, uniform-LOO and uniform-RO stable.
    SymmetricLooRo,
}

impl TryFrom<u8> for AermCase {
    type Error = Error;

    fn try_from(case: u8) -> Result<Self> {
        match case {
            1 => Ok(AermCase::OnlineStable),
            2 => Ok(AermCase::SymmetricLooRo),
            _ => Err(invalid_param("case", format!("unknown case {case}; expected 1 or 2"))),
        }
    }
}

/// Regret rate of an always-AERM.
///
/// Case 1: `(1/m) Σ_{i≤m} ε_on(i) + (1/m) Σ_{i≤m} i·ε_erm(i)`.
/// Case 2: `(1/m) Σ_{i≤m} ε_loo(i) + ε_erm(m) + (1/m) Σ_{i<m} i·[ε_loo(i) + ε_ro(i)]`.
pub fn rate_regret_always_aerm(
    case: AermCase,
    eps_erm: &dyn Fn(usize) -> f64,
    eps_loo: &dyn Fn(usize) -> f64,
    eps_ro: &dyn Fn(usize) -> f64,
    eps_on: &dyn Fn(usize) -> f64,
    max_m: usize,
) -> RateTable {
    let mut first = CompensatedSum::new();
    let mut weighted = CompensatedSum::new();
    match case {
        AermCase::OnlineStable => RateTable::build("regret_always_aerm_1", &[], max_m, |m| {
            first.add(eps_on(m));
            weighted.add(m as f64 * eps_erm(m));
            (first.value() + weighted.value()) / m as f64
        }),
        AermCase::SymmetricLooRo => RateTable::build("regret_always_aerm_2", &[], max_m, |m| {
            first.add(eps_loo(m));
            let mf = m as f64;
            let value = first.value() / mf + eps_erm(m) + weighted.value() / mf;
            // The weighted sum runs to m − 1, so extend it after use.
            weighted.add(mf * (eps_loo(m) + eps_ro(m)));
            value
        }),
    }
}

/// Hedge's uniform-LOO, AERM and regret rates under the default schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedgeRates {
    pub loo: RateTable,
    pub erm: RateTable,
    pub regret: RateTable,
}

/// With `c = B√(2 ln d)`:
/// `loo(m) = c[1/(2√m − 1) + 1/(2√(m+1))]`,
/// `erm(m) = B√(ln d/(2m))·(1 + 1/(2√m))`,
/// `regret(m) = c[3/√m + ln m/(2m) + (1 + 2 ln 2)/(2m)]`.
pub fn rate_hedge(bound: f64, d: usize, max_m: usize) -> Result<HedgeRates> {
    if d < 2 {
        return Err(Error::DegenerateExpertSet(d));
    }
    positive("B", bound)?;
    let ln_d = (d as f64).ln();
    let c = bound * (2.0 * ln_d).sqrt();
    let params = [("B", bound), ("d", d as f64)];
    let loo = RateTable::build("hedge_loo", &params, max_m, |m| {
        let m = m as f64;
        c * (1.0 / (2.0 * m.sqrt() - 1.0) + 1.0 / (2.0 * (m + 1.0).sqrt()))
    });
    let erm = RateTable::build("hedge_erm", &params, max_m, |m| {
        let m = m as f64;
        bound * (ln_d / (2.0 * m)).sqrt() * (1.0 + 1.0 / (2.0 * m.sqrt()))
    });
    let regret = RateTable::build("hedge_regret", &params, max_m, |m| {
        let m = m as f64;
        c * (3.0 / m.sqrt() + m.ln() / (2.0 * m) + (1.0 + 2.0 * 2f64.ln()) / (2.0 * m))
    });
    Ok(HedgeRates { loo, erm, regret })
}
