//! Per-draw rates of OMA and the three hybrid NOMA decoding strategies.
//!
//! The opportunistic user `U_n` splits its power `β ρ_n` between the legacy
//! user's slot (NOMA) and its own slot (OMA). Whether the hybrid scheme pays
//! off is judged against pure OMA at full power `ρ_n`, with slot length 1.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelDraw;
use crate::error::{Error, Result};

/// Scenario parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Number of users `M`.
    pub users: usize,
    /// Legacy user index (1-based rank among ascending gains).
    pub m: usize,
    /// Opportunistic user index (1-based).
    pub n: usize,
    /// Target rate of the legacy user, bits per channel use.
    pub rate_m: f64,
    /// Power reduction coefficient, `0 < β < 1/2`.
    pub beta: f64,
    /// Transmit SNR of `U_n` (linear).
    pub rho_n: f64,
    /// Transmit SNR of `U_m` (linear).
    pub rho_m: f64,
}

impl SystemConfig {
    pub fn new(users: usize, m: usize, n: usize, rate_m: f64, beta: f64, rho_n: f64, rho_m: f64) -> Result<Self> {
        let cfg = Self { users, m, n, rate_m, beta, rho_n, rho_m };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration at `snr_db` for `U_n`, with `ρ_m = ρ_n / η`.
    pub fn at_snr_db(users: usize, m: usize, n: usize, rate_m: f64, beta: f64, snr_db: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::config(format!("eta must be positive, got {eta}")));
        }
        let rho_n = db_to_linear(snr_db);
        Self::new(users, m, n, rate_m, beta, rho_n, rho_n / eta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.users < 2 {
            return Err(Error::config(format!("need at least 2 users, got {}", self.users)));
        }
        if self.m == 0 || self.n == 0 || self.m > self.users || self.n > self.users {
            return Err(Error::config(format!("user indices ({}, {}) outside 1..={}", self.m, self.n, self.users)));
        }
        if self.m == self.n {
            return Err(Error::config("legacy and opportunistic user must differ"));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::config(format!("beta must lie in (0, 1/2), got {}", self.beta)));
        }
        if !(self.rate_m > 0.0) || !self.rate_m.is_finite() {
            return Err(Error::config(format!("target rate must be positive, got {}", self.rate_m)));
        }
        for (name, v) in [("rho_n", self.rho_n), ("rho_m", self.rho_m)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `η = ρ_n / ρ_m`.
    pub fn eta(&self) -> f64 {
        self.rho_n / self.rho_m
    }

    /// `ε_m = 2^{R_m} − 1`.
    pub fn epsilon_m(&self) -> f64 {
        self.rate_m.exp2() - 1.0
    }

    /// `α_m = ε_m / ρ_m`, the gain below which `U_m` tolerates no interference.
    pub fn alpha_m(&self) -> f64 {
        self.epsilon_m() / self.rho_m
    }

    /// Transmit SNR of `U_n` in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * self.rho_n.log10()
    }

    /// Same scenario at a different SNR, keeping `η` fixed.
    pub fn with_snr_db(&self, snr_db: f64) -> Result<Self> {
        Self::at_snr_db(self.users, self.m, self.n, self.rate_m, self.beta, snr_db, self.eta())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Oma,
    Fsic,
    HsicNpa,
    HsicPa,
}

impl Scheme {
    pub const NOMA: [Scheme; 3] = [Scheme::Fsic, Scheme::HsicNpa, Scheme::HsicPa];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Oma => "oma",
            Scheme::Fsic => "fsic",
            Scheme::HsicNpa => "hsic-npa",
            Scheme::HsicPa => "hsic-pa",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oma" => Ok(Scheme::Oma),
            "fsic" => Ok(Scheme::Fsic),
            "hsic-npa" | "npa" => Ok(Scheme::HsicNpa),
            "hsic-pa" | "pa" => Ok(Scheme::HsicPa),
            other => Err(Error::argument(format!("unknown scheme '{other}'"))),
        }
    }
}

/// SIC decoding branch taken in the NOMA slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `U_n` decoded first without disturbing `U_m`.
    TypeI,
    /// `U_n` decoded second at full power.
    TypeIICase1,
    /// `U_n` decoded first after scaling its power down to the tolerated
    /// interference level.
    TypeIICase2,
    NotApplicable,
}

/// Outcome of one scheme on one channel draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateDecision {
    pub scheme: Scheme,
    pub noma_slot_rate: f64,
    pub oma_slot_rate: f64,
    pub branch: Branch,
    /// Power adaptation factor; 1 unless the power-scaled branch is taken.
    pub gamma: f64,
    /// Interference level `U_m` tolerates.
    pub tau_m: f64,
}

impl RateDecision {
    pub fn total_rate(&self) -> f64 {
        self.noma_slot_rate + self.oma_slot_rate
    }
}

/// `τ_m = max(0, ρ_m g_m / ε_m − 1)`.
pub fn tau_threshold(cfg: &SystemConfig, g_m: f64) -> f64 {
    (cfg.rho_m * g_m / cfg.epsilon_m() - 1.0).max(0.0)
}

/// `log2(1 + ρ_n g_n)`, or `log2(1 + β ρ_n g_n)` for the hybrid OMA slot.
pub fn oma_rate(cfg: &SystemConfig, g_n: f64, scaled: bool) -> f64 {
    let power = if scaled { cfg.beta * cfg.rho_n } else { cfg.rho_n };
    (power * g_n).ln_1p() / std::f64::consts::LN_2
}

/// Rates and branch of `scheme` at gains `(g_m, g_n)`.
///
/// For [`Scheme::Oma`] the NOMA slot is unused and the OMA slot carries the
/// full-power rate.
pub fn noma_rate(cfg: &SystemConfig, g_m: f64, g_n: f64, scheme: Scheme) -> RateDecision {
    let tau_m = tau_threshold(cfg, g_m);
    let received = cfg.beta * cfg.rho_n * g_n;
    let log2_1p = |x: f64| x.ln_1p() / std::f64::consts::LN_2;
    let second = || log2_1p(received / (cfg.rho_m * g_m + 1.0));
    let mut decision = RateDecision {
        scheme,
        noma_slot_rate: 0.0,
        oma_slot_rate: oma_rate(cfg, g_n, true),
        branch: Branch::NotApplicable,
        gamma: 1.0,
        tau_m,
    };
    match scheme {
        Scheme::Oma => decision.oma_slot_rate = oma_rate(cfg, g_n, false),
        Scheme::Fsic => decision.noma_slot_rate = second(),
        Scheme::HsicNpa | Scheme::HsicPa if received <= tau_m => {
            decision.branch = Branch::TypeI;
            decision.noma_slot_rate = log2_1p(received);
        }
        Scheme::HsicNpa => {
            decision.branch = Branch::TypeIICase1;
            decision.noma_slot_rate = second();
        }
        Scheme::HsicPa => {
            let case1 = second();
            let case2 = log2_1p(tau_m);
            // equal rates go to the lower-power option
            if case2 >= case1 {
                decision.branch = Branch::TypeIICase2;
                decision.noma_slot_rate = case2;
                decision.gamma = tau_m / received;
            } else {
                decision.branch = Branch::TypeIICase1;
                decision.noma_slot_rate = case1;
            }
        }
    }
    decision
}

/// Whether `scheme` fails to beat pure OMA on this draw.
pub fn underperformance_indicator(cfg: &SystemConfig, draw: &ChannelDraw, scheme: Scheme) -> bool {
    underperforms(cfg, draw.gain(cfg.m), draw.gain(cfg.n), scheme)
}

/// [`underperformance_indicator`] on explicit gains.
pub fn underperforms(cfg: &SystemConfig, g_m: f64, g_n: f64, scheme: Scheme) -> bool {
    noma_rate(cfg, g_m, g_n, scheme).total_rate() <= oma_rate(cfg, g_n, false)
}

/// Transmit energy of `U_n` over one frame (slot length 1).
pub fn energy(cfg: &SystemConfig, decision: &RateDecision) -> f64 {
    match decision.scheme {
        Scheme::Oma => cfg.rho_n,
        Scheme::Fsic | Scheme::HsicNpa => 2.0 * cfg.beta * cfg.rho_n,
        Scheme::HsicPa => (1.0 + decision.gamma) * cfg.beta * cfg.rho_n,
    }
}
