//! Block-parallel Monte Carlo over ordered channel draws.
//!
//! Trials are cut into fixed-size blocks; block `b` draws from stream
//! `(seed, b)` and per-block tallies are merged in block order, so results
//! are bit-identical for any thread count.

use rayon::prelude::*;
use serde::Serialize;

use super::estimate::ProbEstimate;
use super::region::{Curves, SUBEVENTS_M_GT_N, SUBEVENTS_M_LT_N};
use crate::error::{Error, Result};
use crate::numerics::Stream;
use crate::schemes::{energy, noma_rate, oma_rate, Branch, RateDecision, Scheme, SystemConfig};

/// Trials per random stream.
pub const BLOCK_SIZE: u64 = 1 << 16;

/// Monte Carlo outcome for one scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub estimate: ProbEstimate,
    pub hits: u64,
    /// Mean power adaptation factor over all draws.
    pub gamma_mean: f64,
    /// Mean transmit energy of `U_n` per frame.
    pub energy_mean: f64,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    hits: Vec<u64>,
    gamma: Vec<f64>,
    energy: Vec<f64>,
}

impl Tally {
    fn new(k: usize) -> Self {
        Self { hits: vec![0; k], gamma: vec![0.0; k], energy: vec![0.0; k] }
    }

    fn merge(&mut self, other: &Tally) {
        for k in 0..self.hits.len() {
            self.hits[k] += other.hits[k];
            self.gamma[k] += other.gamma[k];
            self.energy[k] += other.energy[k];
        }
    }
}

fn check(cfg: &SystemConfig, trials: u64) -> Result<()> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::argument("trial count must be at least 1"));
    }
    Ok(())
}

/// Run `per_draw(g_m, g_n, tally)` over all trials, block-parallel.
fn run<F>(cfg: &SystemConfig, trials: u64, seed: u64, slots: usize, per_draw: F) -> Tally
where
    F: Fn(f64, f64, &mut Tally) + Sync,
{
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let tallies: Vec<Tally> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut stream = Stream::new(seed, b);
            let count = BLOCK_SIZE.min(trials - b * BLOCK_SIZE);
            let mut gains = vec![0.0; cfg.users];
            let mut tally = Tally::new(slots);
            for _ in 0..count {
                gains.iter_mut().for_each(|g| *g = stream.exp1());
                gains.sort_unstable_by(f64::total_cmp);
                per_draw(gains[cfg.m - 1], gains[cfg.n - 1], &mut tally);
            }
            tally
        })
        .collect();
    let mut total = Tally::new(slots);
    for t in &tallies {
        total.merge(t);
    }
    total
}

/// Estimate the failure probability of several schemes on shared draws.
pub fn estimate_schemes(cfg: &SystemConfig, schemes: &[Scheme], trials: u64, seed: u64) -> Result<Vec<SchemeSummary>> {
    check(cfg, trials)?;
    let tally = run(cfg, trials, seed, schemes.len(), |g_m, g_n, t| {
        let benchmark = oma_rate(cfg, g_n, false);
        for (k, &scheme) in schemes.iter().enumerate() {
            let d = noma_rate(cfg, g_m, g_n, scheme);
            t.hits[k] += u64::from(d.total_rate() <= benchmark);
            t.gamma[k] += d.gamma;
            t.energy[k] += energy(cfg, &d);
        }
    });
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(k, &scheme)| SchemeSummary {
            scheme,
            estimate: ProbEstimate::from_counts(tally.hits[k], trials),
            hits: tally.hits[k],
            gamma_mean: tally.gamma[k] / trials as f64,
            energy_mean: tally.energy[k] / trials as f64,
        })
        .collect())
}

/// Estimate the probability that `scheme` fails to beat OMA.
pub fn estimate_probability(cfg: &SystemConfig, scheme: Scheme, trials: u64, seed: u64) -> Result<ProbEstimate> {
    Ok(estimate_schemes(cfg, &[scheme], trials, seed)?[0].estimate)
}

/// Counts of the power-adapted scheme's failures split by cause.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub trials: u64,
    /// Failures on the Type I branch.
    pub type_one: u64,
    /// Failures with no interference budget (`g_m < α_m`).
    pub no_budget: u64,
    /// Failures on the Type II branch with a positive budget, per sub-event.
    pub subevents: Vec<(&'static str, u64)>,
    /// All failures.
    pub total: u64,
}

impl Decomposition {
    pub fn power_adaptation(&self) -> u64 {
        self.subevents.iter().map(|(_, c)| c).sum()
    }

    pub fn estimate(&self, hits: u64) -> ProbEstimate {
        ProbEstimate::from_counts(hits, self.trials)
    }

    pub fn subevent(&self, label: &str) -> Option<u64> {
        self.subevents.iter().find(|(l, _)| *l == label).map(|(_, c)| *c)
    }
}

/// Sub-event index of a failing Type II draw with positive budget.
fn classify(cfg: &SystemConfig, c: &Curves, u: f64, d: &RateDecision) -> usize {
    let scaled = d.branch == Branch::TypeIICase2;
    let (phi, theta, omega) = (c.phi(u), c.theta(u), c.omega(u));
    if cfg.m < cfg.n {
        match (scaled, phi > u && phi > theta, theta > u && theta >= phi) {
            (true, true, _) => 0,
            (true, false, true) => 1,
            (true, false, false) => 2,
            (false, ..) if u > omega => 3,
            (false, ..) => 4,
        }
    } else if scaled {
        match (phi > theta, u > omega) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        }
    } else if u < c.psi(u) {
        4
    } else {
        5
    }
}

/// Classify every failing draw of the power-adapted scheme into exactly one
/// bucket: Type I, no budget, or one power-adaptation sub-event.
pub fn estimate_decomposition(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<Decomposition> {
    check(cfg, trials)?;
    let labels: &[&'static str] = if cfg.m < cfg.n { &SUBEVENTS_M_LT_N } else { &SUBEVENTS_M_GT_N };
    let curves = Curves::new(cfg);
    // slots: [total, type one, no budget, sub-events...]
    let tally = run(cfg, trials, seed, 3 + labels.len(), |g_m, g_n, t| {
        let d = noma_rate(cfg, g_m, g_n, Scheme::HsicPa);
        if d.total_rate() > oma_rate(cfg, g_n, false) {
            return;
        }
        t.hits[0] += 1;
        let slot = if d.branch == Branch::TypeI {
            1
        } else if d.tau_m == 0.0 {
            2
        } else {
            3 + classify(cfg, &curves, g_m, &d)
        };
        t.hits[slot] += 1;
    });
    let out = Decomposition {
        trials,
        type_one: tally.hits[1],
        no_budget: tally.hits[2],
        subevents: labels.iter().zip(&tally.hits[3..]).map(|(l, c)| (*l, *c)).collect(),
        total: tally.hits[0],
    };
    assert_eq!(out.type_one + out.no_budget + out.power_adaptation(), out.total, "decomposition is not a partition");
    Ok(out)
}
