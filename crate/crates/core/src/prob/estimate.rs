use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mc,
    Exact,
    Asymptotic,
    NumericIntegration,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Exact => "exact",
            Method::Asymptotic => "asymptotic",
            Method::NumericIntegration => "numeric-integration",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(Method::Mc),
            "exact" => Ok(Method::Exact),
            "asymptotic" => Ok(Method::Asymptotic),
            "numeric-integration" | "integration" | "numeric" => Ok(Method::NumericIntegration),
            other => Err(crate::Error::argument(format!("unknown method '{other}'"))),
        }
    }
}

/// A probability with its uncertainty.
///
/// `std_err` is the binomial standard error for Monte Carlo, the absolute
/// error estimate for numeric integration, and 0 for closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub value: f64,
    pub trials: u64,
    pub std_err: f64,
    pub method: Method,
    /// One-sided 95% upper bound `3/trials` when no trial hit the event.
    pub upper_bound: Option<f64>,
}

impl ProbEstimate {
    /// Monte Carlo estimate from `hits` out of `trials`.
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let value = hits as f64 / trials as f64;
        Self {
            value,
            trials,
            std_err: (value * (1.0 - value) / trials as f64).sqrt(),
            method: Method::Mc,
            upper_bound: (hits == 0).then(|| 3.0 / trials as f64),
        }
    }

    pub fn exact(value: f64) -> Self {
        Self::deterministic(value, 0.0, Method::Exact)
    }

    pub fn asymptotic(value: f64) -> Self {
        Self::deterministic(value, 0.0, Method::Asymptotic)
    }

    pub fn integrated(value: f64, error: f64) -> Self {
        Self::deterministic(value.clamp(0.0, 1.0), error, Method::NumericIntegration)
    }

    fn deterministic(value: f64, std_err: f64, method: Method) -> Self {
        Self { value, trials: 0, std_err, method, upper_bound: None }
    }

    /// Whether `reference` is within `k` standard errors of this Monte Carlo
    /// estimate. With zero hits the one-sided bound is used instead.
    pub fn consistent_with(&self, reference: f64, k: f64) -> bool {
        match self.upper_bound {
            Some(bound) => reference <= bound,
            None => (self.value - reference).abs() <= k * self.std_err,
        }
    }
}
