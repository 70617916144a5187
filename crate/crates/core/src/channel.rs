//! Ordered Rayleigh channel gains.
//!
//! The `M` users' power gains `|h|²` are i.i.d. unit-mean exponentials,
//! sorted ascending, so user `k` (1-based) holds the `k`-th smallest gain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{binomial, factorial, Stream};

/// One realization of the ascending channel gains of all `M` users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDraw {
    gains: Vec<f64>,
}

impl ChannelDraw {
    /// Wrap an explicit gain vector, sorting it ascending.
    pub fn from_gains(mut gains: Vec<f64>) -> Result<Self> {
        if gains.len() < 2 {
            return Err(Error::config(format!("need at least 2 users, got {}", gains.len())));
        }
        if gains.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::argument("channel gains must be finite and nonnegative"));
        }
        gains.sort_by(f64::total_cmp);
        Ok(Self { gains })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn users(&self) -> usize {
        self.gains.len()
    }

    /// Gain of user `k`, 1-based.
    pub fn gain(&self, k: usize) -> f64 {
        self.gains[k - 1]
    }
}

/// Draw `users` ordered gains from `stream`.
pub fn sample_ordered_gains(users: usize, stream: &mut Stream) -> Result<ChannelDraw> {
    if users < 2 {
        return Err(Error::config(format!("need at least 2 users, got {users}")));
    }
    let mut gains: Vec<f64> = (0..users).map(|_| stream.exp1()).collect();
    gains.sort_by(f64::total_cmp);
    Ok(ChannelDraw { gains })
}

/// One exponential term `coeff · e^{−x_rate·x} · e^{−y_rate·y}` of the
/// finite-sum form of the pair density. `x` is always the smaller gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub coeff: f64,
    pub x_rate: f64,
    pub y_rate: f64,
    /// Index `p` of the outer binomial sum.
    pub p: usize,
    /// Index `l` of the inner binomial sum.
    pub l: usize,
}

/// Joint law of the gains of the legacy user `m` and the opportunistic
/// user `n` among `M` ordered users.
///
/// Densities take `(x, y)` with `x < y`: for `m < n` that is `(g_m, g_n)`,
/// for `m > n` it is `(g_n, g_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderPairDensity {
    users: usize,
    m: usize,
    n: usize,
}

impl OrderPairDensity {
    pub fn new(users: usize, m: usize, n: usize) -> Result<Self> {
        if users < 2 {
            return Err(Error::config(format!("need at least 2 users, got {users}")));
        }
        if m == 0 || n == 0 || m > users || n > users {
            return Err(Error::config(format!("user indices ({m}, {n}) outside 1..={users}")));
        }
        if m == n {
            return Err(Error::config("legacy and opportunistic user must differ"));
        }
        Ok(Self { users, m, n })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ranks `(i, j)`, `i < j`, of the smaller and larger gain.
    pub fn ranks(&self) -> (usize, usize) {
        (self.m.min(self.n), self.m.max(self.n))
    }

    /// Multinomial prefactor `M! / ((i−1)! (j−i−1)! (M−j)!)`.
    pub fn prefactor(&self) -> f64 {
        let (i, j) = self.ranks();
        factorial(self.users) / (factorial(i - 1) * factorial(j - i - 1) * factorial(self.users - j))
    }

    /// Joint density, evaluated in the factored form
    /// `c F(x)^{i−1} (F(y)−F(x))^{j−i−1} (1−F(y))^{M−j} f(x) f(y)`
    /// with `F(t) = 1 − e^{−t}`, which has no cancellation.
    pub fn joint_pdf(&self, x: f64, y: f64) -> f64 {
        if !(x >= 0.0) || !(y > x) {
            return 0.0;
        }
        let (i, j) = self.ranks();
        let below = -(-x).exp_m1();
        let between = (-x).exp() * -(x - y).exp_m1();
        let log_tail = -((self.users - j + 1) as f64) * y - x;
        self.prefactor() * below.powi((i - 1) as i32) * between.powi((j - i - 1) as i32) * log_tail.exp()
    }

    /// Terms of the expanded finite-sum form of [`joint_pdf`](Self::joint_pdf).
    pub fn series_terms(&self) -> Vec<ExpTerm> {
        let (i, j) = self.ranks();
        let c = self.prefactor();
        let k_outer = j - i - 1;
        let mut terms = Vec::with_capacity((k_outer + 1) * i);
        for p in 0..=k_outer {
            let c_p = binomial(k_outer, p) * sign(k_outer - p);
            for l in 0..i {
                let c_l = binomial(i - 1, l) * sign(l);
                terms.push(ExpTerm {
                    coeff: c * c_p * c_l,
                    x_rate: (l + p + 1) as f64,
                    y_rate: (self.users - i - p) as f64,
                    p,
                    l,
                });
            }
        }
        terms
    }

    /// Joint density from the expanded sum. Loses accuracy near the origin
    /// through cancellation; kept as a cross-check of the factored form.
    pub fn joint_pdf_series(&self, x: f64, y: f64) -> f64 {
        if !(x >= 0.0) || !(y > x) {
            return 0.0;
        }
        self.series_terms().iter().map(|t| t.coeff * (-t.x_rate * x - t.y_rate * y).exp()).sum()
    }

    /// Leading-order polynomial density for small gains,
    /// `c Σ_p C(j−i−1, p) (−1)^p y^{j−i−1−p} x^{i−1+p} = c x^{i−1} (y−x)^{j−i−1}`.
    pub fn joint_pdf_near_zero(&self, x: f64, y: f64) -> f64 {
        if !(x >= 0.0) || !(y > x) {
            return 0.0;
        }
        let (i, j) = self.ranks();
        self.prefactor() * x.powi((i - 1) as i32) * (y - x).powi((j - i - 1) as i32)
    }
}

#[inline]
fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}
