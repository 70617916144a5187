//! Crossing points of the boundary curves and the `η` thresholds that
//! decide which of them bound each sub-event.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schemes::SystemConfig;

/// Positive root of `u² − b u − c = 0` for `c > 0`, without cancellation.
fn positive_root(b: f64, c: f64) -> f64 {
    let disc = (b * b + 4.0 * c).sqrt();
    if b >= 0.0 {
        0.5 * (b + disc)
    } else {
        2.0 * c / (disc - b)
    }
}

/// Scalars shared by all closed-form terms of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeConstants {
    pub beta: f64,
    pub eta: f64,
    pub eps_m: f64,
    pub alpha_m: f64,
    /// `Φ(u) = u`; absent when `Φ` never reaches the diagonal (`η ≥ 1/(βε_m)`).
    pub omega_1: Option<f64>,
    /// `Φ(u) = Θ(u)`, i.e. `(1 − β) α_m / β`.
    pub omega_2: f64,
    /// Type I break-even gain `(1 − 2β)/(β² ρ_n)`.
    pub omega_3: f64,
    /// `Ψ(u) = u`; absent when `Ψ` stays above the diagonal (`η ≤ (1−β)/β²`).
    pub omega_4: Option<f64>,
    /// `Θ = Ω = Ψ`.
    pub z_1: f64,
    /// `Θ(u) = u`.
    pub z_2: f64,
    /// `Ω(u) = u`.
    pub z_3: f64,
    pub k_1: f64,
    pub k_2: f64,
    pub k_3: f64,
}

impl RegimeConstants {
    /// `(1 − β)/(β ε_m)`.
    pub fn k_mid(&self) -> f64 {
        (1.0 - self.beta) / (self.beta * self.eps_m)
    }

    /// `1/(β ε_m)`.
    pub fn k_top(&self) -> f64 {
        1.0 / (self.beta * self.eps_m)
    }

    /// `(1 − β)/β²`, where the slope of `Ψ` drops to one.
    pub fn k_psi(&self) -> f64 {
        (1.0 - self.beta) / (self.beta * self.beta)
    }

    pub fn omega_1_or_inf(&self) -> f64 {
        self.omega_1.unwrap_or(f64::INFINITY)
    }

    pub fn omega_4_or_inf(&self) -> f64 {
        self.omega_4.unwrap_or(f64::INFINITY)
    }

    /// Column (0-based) of the first table for each ordering: for `m < n`
    /// the thresholds are `k_1`, `(1−β)/(βε_m)`, `1/(βε_m)`; for `m > n`
    /// they are `k_1`, `k_3`. Ties fall to the left column.
    pub fn first_column(&self, legacy_smaller: bool) -> usize {
        let cuts: &[f64] = if legacy_smaller { &[self.k_1, self.k_mid(), self.k_top()] } else { &[self.k_1, self.k_3] };
        cuts.iter().take_while(|&&k| self.eta > k).count()
    }

    /// Column (0-based) of the second table: thresholds `(1−β)/β²`, `k_2`.
    pub fn second_column(&self) -> usize {
        [self.k_psi(), self.k_2].iter().take_while(|&&k| self.eta > k).count()
    }

    /// Human-readable regime tag such as `I.2+II.1`.
    pub fn regime_tag(&self, legacy_smaller: bool) -> String {
        let (a, b) = if legacy_smaller { ("I", "II") } else { ("III", "IV") };
        format!("{a}.{}+{b}.{}", self.first_column(legacy_smaller) + 1, self.second_column() + 1)
    }

    /// All `η` thresholds that can change the dispatch for this ordering.
    pub fn thresholds(&self, legacy_smaller: bool) -> Vec<f64> {
        let mut t = if legacy_smaller { vec![self.k_1, self.k_mid(), self.k_top()] } else { vec![self.k_1, self.k_3] };
        t.extend([self.k_psi(), self.k_2]);
        t
    }
}

/// Evaluate every crossing point and threshold for `cfg`.
pub fn compute_constants(cfg: &SystemConfig) -> Result<RegimeConstants> {
    cfg.validate()?;
    let beta = cfg.beta;
    let eps = cfg.epsilon_m();
    let alpha = cfg.alpha_m();
    let a = 1.0 / alpha;
    let eta = cfg.eta();
    let (rho_n, rho_m) = (cfg.rho_n, cfg.rho_m);

    let omega_1 = (a > beta * rho_n).then(|| 1.0 / (a - beta * rho_n));
    let omega_2 = (1.0 - beta) * alpha / beta;
    let omega_3 = (1.0 - 2.0 * beta) / (beta * beta * rho_n);
    let denom_4 = beta * beta * rho_n - (1.0 - beta) * rho_m;
    let omega_4 = (denom_4 > 0.0).then(|| (1.0 - 2.0 * beta) / denom_4);

    let z_1 = positive_root(alpha / beta - 1.0 / rho_m, (1.0 - beta) * alpha / (beta * rho_m));
    let z_2 = positive_root(alpha / beta - 1.0 / (beta * rho_n), alpha / (beta * rho_n));
    let z_3 = positive_root(beta * eta * alpha + alpha - 1.0 / rho_m, alpha / rho_m);

    let k_1 = (1.0 - 2.0 * beta) / ((1.0 - beta) * beta * eps);
    let k_2 = (1.0 - beta) / (beta * beta) + (1.0 - 2.0 * beta) / (beta * beta * eps);
    let k_3 = k_1 + (1.0 - 2.0 * beta) / (beta * beta);

    let consts = RegimeConstants {
        beta,
        eta,
        eps_m: eps,
        alpha_m: alpha,
        omega_1,
        omega_2,
        omega_3,
        omega_4,
        z_1,
        z_2,
        z_3,
        k_1,
        k_2,
        k_3,
    };
    let finite =
        [alpha, omega_2, omega_3, z_1, z_2, z_3, k_1, k_2, k_3, omega_1.unwrap_or(0.0), omega_4.unwrap_or(0.0)]
            .iter()
            .all(|x| x.is_finite());
    if !finite || !(alpha > 0.0) {
        return Err(Error::config(format!("degenerate configuration yields non-finite constants: {consts:?}")));
    }
    Ok(consts)
}
