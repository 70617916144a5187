//! Sweep documents: one curve of a figure, read from flat JSON.

use std::fmt;
use std::str::FromStr;

use hnoma::prob::Method;
use hnoma::{Scheme, SystemConfig};
use serde::{Deserialize, Deserializer, Serialize};

use crate::CliError;

/// What a row measures: a scheme's underperformance probability, or the
/// power-adaptation failure event of HSIC-PA on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Scheme(Scheme),
    PowerAdaptation,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Scheme(s) => s.name(),
            Quantity::PowerAdaptation => "pt",
        }
    }

    /// Whether `method` can evaluate this quantity. The closed forms cover
    /// only the power-adaptation event.
    pub fn supports(self, method: Method) -> bool {
        match self {
            Quantity::PowerAdaptation => true,
            Quantity::Scheme(_) => matches!(method, Method::Mc | Method::NumericIntegration),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "pt" | "p_t" | "power-adaptation" => Ok(Quantity::PowerAdaptation),
            other => match other.parse::<Scheme>() {
                Ok(Scheme::Oma) => Err(CliError::Config("'oma' is the benchmark, not a scheme under test".into())),
                Ok(s) => Ok(Quantity::Scheme(s)),
                Err(e) => Err(CliError::Config(e.to_string())),
            },
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn default_trials() -> u64 {
    1_000_000
}

fn default_n_c() -> usize {
    256
}

fn default_seed() -> u64 {
    1
}

/// One curve: a base configuration swept over SNR (`SNR = ρ_n`, with
/// `ρ_m = ρ_n/η`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub name: String,
    pub users: usize,
    pub m: usize,
    pub n: usize,
    pub rate_m: f64,
    pub beta: f64,
    pub eta: f64,
    pub snr_db: Vec<f64>,
    pub schemes: Vec<Quantity>,
    pub methods: Vec<Method>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_n_c")]
    pub n_c: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl SweepSpec {
    /// Parse one flat JSON object.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad sweep document: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Parse either one object or an array of objects.
    pub fn many_from_json(text: &str) -> Result<Vec<Self>, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad sweep document: {e}")))?;
        let specs: Vec<Self> = if value.is_array() {
            serde_json::from_value(value)
        } else {
            serde_json::from_value(value).map(|s| vec![s])
        }
        .map_err(|e| CliError::Config(format!("bad sweep document: {e}")))?;
        for s in &specs {
            s.validate()?;
        }
        Ok(specs)
    }

    /// Check everything that can be checked before any work is done.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(format!("{}: {msg}", self.label())));
        if self.snr_db.is_empty() {
            return bad("empty SNR grid".into());
        }
        if self.snr_db.iter().any(|x| !x.is_finite()) {
            return bad("non-finite SNR value".into());
        }
        if self.schemes.is_empty() {
            return bad("empty scheme list".into());
        }
        if self.methods.is_empty() {
            return bad("empty method list".into());
        }
        if self.methods.contains(&Method::Mc) && self.trials == 0 {
            return bad("Monte Carlo needs at least one trial".into());
        }
        if self.methods.contains(&Method::Exact) && self.n_c < 16 {
            return bad(format!("quadrature node count must be at least 16, got {}", self.n_c));
        }
        for &q in &self.schemes {
            for &m in &self.methods {
                if !q.supports(m) {
                    return bad(format!("method '{m}' is not available for '{q}'; closed forms cover only 'pt'"));
                }
            }
        }
        for &snr in &self.snr_db {
            self.config(snr)?;
        }
        Ok(())
    }

    /// System configuration at one grid point.
    pub fn config(&self, snr_db: f64) -> Result<SystemConfig, CliError> {
        SystemConfig::at_snr_db(self.users, self.m, self.n, self.rate_m, self.beta, snr_db, self.eta)
            .map_err(|e| CliError::Config(format!("{}: {e}", self.label())))
    }

    pub fn label(&self) -> String {
        if self.name.is_empty() {
            format!("M={} m={} n={} eta={}", self.users, self.m, self.n, self.eta)
        } else {
            self.name.clone()
        }
    }
}
