//! Running a sweep and writing its table.

use std::io::Write;

use hnoma::analytic::{compute_constants, p_t_asymptotic, p_t_exact};
use hnoma::channel::OrderPairDensity;
use hnoma::prob::{
    estimate_decomposition, estimate_schemes, integrate_event, EventRegion, IntegrateOptions, Method, ProbEstimate,
};
use hnoma::{Scheme, SystemConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::spec::{Quantity, SweepSpec};
use crate::CliError;

/// CSV header, in column order.
pub const COLUMNS: [&str; 9] =
    ["snr_db", "scheme", "method", "value", "std_err", "trials", "regime", "gamma_mean", "energy_mean"];

/// One output row. Numbers that do not apply are left empty; a failed
/// evaluation leaves `value` empty and puts `error: …` in `regime`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub snr_db: f64,
    pub scheme: String,
    pub method: String,
    pub value: Option<f64>,
    pub std_err: Option<f64>,
    pub trials: u64,
    pub regime: String,
    pub gamma_mean: Option<f64>,
    pub energy_mean: Option<f64>,
}

impl Row {
    fn new(snr_db: f64, q: Quantity, m: Method, regime: &str) -> Self {
        Self {
            snr_db,
            scheme: q.name().into(),
            method: m.name().into(),
            value: None,
            std_err: None,
            trials: 0,
            regime: regime.into(),
            gamma_mean: None,
            energy_mean: None,
        }
    }

    fn fill(mut self, e: &ProbEstimate) -> Self {
        self.value = Some(e.value);
        self.std_err = Some(e.std_err);
        self.trials = e.trials;
        self
    }

    fn failed(mut self, err: impl std::fmt::Display) -> Self {
        self.regime = format!("error: {err}");
        self
    }
}

/// Rows for one grid point, in scheme-then-method order.
fn grid_point(spec: &SweepSpec, snr_db: f64) -> Vec<Row> {
    let cfg = match spec.config(snr_db) {
        Ok(c) => c,
        Err(e) => {
            let e = &e;
            return spec
                .schemes
                .iter()
                .flat_map(|&q| spec.methods.iter().map(move |&m| Row::new(snr_db, q, m, "").failed(e)))
                .collect();
        }
    };
    let regime = compute_constants(&cfg).map(|c| c.regime_tag(cfg.m < cfg.n)).unwrap_or_default();

    // Monte Carlo draws are shared by all schemes of a grid point, and the
    // same seed is used along the grid (common random numbers).
    let schemes: Vec<Scheme> = spec
        .schemes
        .iter()
        .filter_map(|q| match q {
            Quantity::Scheme(s) => Some(*s),
            Quantity::PowerAdaptation => None,
        })
        .collect();
    let mc = spec.methods.contains(&Method::Mc);
    let summaries = (mc && !schemes.is_empty()).then(|| estimate_schemes(&cfg, &schemes, spec.trials, spec.seed));
    let decomposition = (mc && spec.schemes.contains(&Quantity::PowerAdaptation))
        .then(|| estimate_decomposition(&cfg, spec.trials, spec.seed));

    let mut rows = Vec::new();
    for &q in &spec.schemes {
        for &m in &spec.methods {
            let row = Row::new(snr_db, q, m, &regime);
            let row = match (q, m) {
                (Quantity::Scheme(s), Method::Mc) => match summaries.as_ref().expect("scheme MC was run") {
                    Ok(all) => {
                        let sum = all.iter().find(|x| x.scheme == s).expect("scheme was simulated");
                        let mut r = row.fill(&sum.estimate);
                        r.gamma_mean = Some(sum.gamma_mean);
                        r.energy_mean = Some(sum.energy_mean);
                        r
                    }
                    Err(e) => row.failed(e),
                },
                (Quantity::PowerAdaptation, Method::Mc) => match decomposition.as_ref().expect("decomposition was run")
                {
                    Ok(d) => row.fill(&d.estimate(d.power_adaptation())),
                    Err(e) => row.failed(e),
                },
                (_, Method::NumericIntegration) => match integrated(&cfg, q) {
                    Ok(e) => row.fill(&e),
                    Err(e) => row.failed(e),
                },
                (Quantity::PowerAdaptation, Method::Exact) => {
                    match compute_constants(&cfg).and_then(|c| p_t_exact(&cfg, &c, spec.n_c)) {
                        Ok(e) => row.fill(&e),
                        Err(e) => row.failed(e),
                    }
                }
                (Quantity::PowerAdaptation, Method::Asymptotic) => match p_t_asymptotic(&cfg) {
                    Ok(e) => row.fill(&e),
                    Err(e) => row.failed(e),
                },
                (Quantity::Scheme(_), _) => row.failed("method not available for this scheme"),
            };
            rows.push(row);
        }
    }
    rows
}

fn integrated(cfg: &SystemConfig, q: Quantity) -> hnoma::Result<ProbEstimate> {
    let region = match q {
        Quantity::PowerAdaptation => EventRegion::power_adaptation(cfg),
        Quantity::Scheme(s) => EventRegion::failure(cfg, s),
    };
    let pair = OrderPairDensity::new(cfg.users, cfg.m, cfg.n)?;
    integrate_event(&region, &pair, &IntegrateOptions::default())
}

/// Evaluate every grid point of `spec`. Grid points run in parallel; rows
/// come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<Row>, CliError> {
    spec.validate()?;
    Ok(spec.snr_db.par_iter().map(|&snr| grid_point(spec, snr)).collect::<Vec<_>>().concat())
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn write_rows<W: Write>(rows: &[Row], format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if rows.is_empty() {
                w.write_record(COLUMNS).map_err(|e| CliError::Io(e.to_string()))?;
            }
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}
