//! Configuration generators shared by the integration suites.

#![allow(dead_code)]

use hnoma::analytic::compute_constants;
use hnoma::numerics::Stream;
use hnoma::SystemConfig;

/// A regime column: which table family and which column, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub legacy_smaller: bool,
    /// `false` for the first table of the family, `true` for the second.
    pub second_table: bool,
    pub index: usize,
}

/// Every column of every table: four and three for `m < n`, three and
/// three for `m > n`.
pub fn all_columns() -> Vec<Column> {
    let mut out = Vec::new();
    for (legacy_smaller, first, second) in [(true, 4, 3), (false, 3, 3)] {
        out.extend((0..first).map(|index| Column { legacy_smaller, second_table: false, index }));
        out.extend((0..second).map(|index| Column { legacy_smaller, second_table: true, index }));
    }
    out
}

fn uniform(s: &mut Stream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * s.uniform_open0()
}

/// A random configuration whose `η` lies strictly inside `column`, at an
/// SNR drawn from `snr_db`.
pub fn config_in(column: Column, snr_db: (f64, f64), s: &mut Stream) -> SystemConfig {
    config_in_capped(column, snr_db, 1e4, s)
}

/// [`config_in`] with `η < max_eta`.
pub fn config_in_capped(column: Column, snr_db: (f64, f64), max_eta: f64, s: &mut Stream) -> SystemConfig {
    loop {
        let users = 5;
        let small = 1 + (s.next_u64() % 4) as usize;
        let large = small + 1 + (s.next_u64() % (users - small) as u64) as usize;
        let (m, n) = if column.legacy_smaller { (small, large) } else { (large, small) };
        let beta = uniform(s, 0.1, 0.45);
        let rate = uniform(s, 0.2, 2.0);
        let snr = uniform(s, snr_db.0, snr_db.1);
        let probe = SystemConfig::at_snr_db(users, m, n, rate, beta, snr, 1.0).unwrap();
        let k = compute_constants(&probe).unwrap();
        let cuts: Vec<f64> = match (column.legacy_smaller, column.second_table) {
            (true, false) => vec![k.k_1, k.k_mid(), k.k_top()],
            (false, false) => vec![k.k_1, k.k_3],
            (_, true) => vec![k.k_psi(), k.k_2],
        };
        let lo = if column.index == 0 { cuts[0] / 20.0 } else { cuts[column.index - 1] };
        let hi = if column.index == cuts.len() { cuts[cuts.len() - 1] * 5.0 } else { cuts[column.index] };
        // log-uniform inside the column, away from its edges
        let eta = (lo.ln() + (hi.ln() - lo.ln()) * uniform(s, 0.05, 0.95)).exp();
        if !(eta > 1e-3 && eta < max_eta) {
            continue;
        }
        let cfg = SystemConfig::at_snr_db(users, m, n, rate, beta, snr, eta).unwrap();
        let k = compute_constants(&cfg).unwrap();
        let got = if column.second_table { k.second_column() } else { k.first_column(column.legacy_smaller) };
        if got == column.index {
            return cfg;
        }
    }
}

pub fn describe(cfg: &SystemConfig) -> String {
    let tag = compute_constants(cfg).map(|k| k.regime_tag(cfg.m < cfg.n)).unwrap_or_default();
    format!(
        "m={} n={} R={:.3} beta={:.3} eta={:.3} snr={:.1}dB [{tag}]",
        cfg.m,
        cfg.n,
        cfg.rate_m,
        cfg.beta,
        cfg.eta(),
        cfg.snr_db()
    )
}
