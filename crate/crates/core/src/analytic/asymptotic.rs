//! High-SNR behaviour of the power-adaptation failure probability.
//!
//! In scaled gains `X = ρ_m u`, `Y = ρ_m v` every boundary curve and every
//! crossing point is independent of `ρ_m` once `η = ρ_n/ρ_m` is fixed:
//!
//! * `Φ̄ = (X/ε − 1)/(βη)`, `Ω̄ = (X/ε − 1)(1 + X)/(βη)`,
//! * `Θ̄ = (X/ε − 1)/(η(1 − βX/ε))`, `Ψ̄ = ((1−β)(X+1) − β)/(β²η)`.
//!
//! The only SNR dependence left is in the density, whose leading term near
//! the origin is the polynomial `c x^{i−1}(y−x)^{j−i−1}` with
//! `i = min(m, n)`, `j = max(m, n)`. Hence
//! `P_T ≈ κ ρ_m^{−max(m,n)}` with `κ` the integral of that polynomial over
//! the scaled region, evaluated strip by strip with the same regime
//! dispatch as the exact engine.
//!
//! Polynomial edges are integrated by a Gauss–Legendre rule of sufficient
//! degree (exact up to rounding). Rational `Θ̄` edges go through
//! [`gamma5_series`], the power series of `X^s Θ̄(X)^k`.

use serde::Serialize;

use super::constants::RegimeConstants;
use super::exact::{strips, Edge, Strip, StripValue};
use crate::channel::OrderPairDensity;
use crate::error::{Error, Result};
use crate::numerics::{adaptive, binomial, gauss_legendre, AdaptiveOptions, NeumaierSum};
use crate::prob::ProbEstimate;
use crate::schemes::SystemConfig;

/// Default relative tolerance of the `Θ̄` power series.
pub const SERIES_TOL: f64 = 1e-13;
/// Hard cap on the number of series terms.
pub const SERIES_MAX_TERMS: usize = 10_000;

/// Fixed-`η` limits of the crossing points, in scaled gain units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticConstants {
    pub beta: f64,
    pub eps_m: f64,
    pub eta: f64,
    /// `Φ̄ = X`: `1/(1/ε − βη)`, absent when `βηε ≥ 1`.
    pub varpi_1: Option<f64>,
    /// `Φ̄ = Θ̄`: `(1 − β)ε/β`.
    pub varpi_2: f64,
    /// Type I break-even level `(1 − 2β)/(β²η)`.
    pub varpi_3: f64,
    /// `Ψ̄ = X`: `(1 − 2β)/(β²η − (1 − β))`, absent when the denominator is not positive.
    pub varpi_4: Option<f64>,
    /// `Θ̄ = Ω̄ = Ψ̄`: root of `X² − (ε/β − 1)X − (1−β)ε/β`.
    pub zbar_1: f64,
    /// `Θ̄ = X`: root of `X² − (ε/β − 1/(βη))X − ε/(βη)`.
    pub zbar_2: f64,
    /// `Ω̄ = X`: root of `X² − (βηε + ε − 1)X − ε`.
    pub zbar_3: f64,
    /// Relative tolerance used for the `Θ̄` series.
    pub series_tol: f64,
}

fn positive_root(b: f64, c: f64) -> f64 {
    let disc = (b * b + 4.0 * c).sqrt();
    if b >= 0.0 {
        0.5 * (b + disc)
    } else {
        2.0 * c / (disc - b)
    }
}

impl AsymptoticConstants {
    /// Limits for `cfg`'s `β`, `R_m` and `η`; `ρ_m` itself is not used.
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.m == cfg.n {
            return Err(Error::config("asymptotic analysis needs m ≠ n"));
        }
        let beta = cfg.beta;
        let eps = cfg.epsilon_m();
        let eta = cfg.eta();
        let d4 = beta * beta * eta - (1.0 - beta);
        let c = Self {
            beta,
            eps_m: eps,
            eta,
            varpi_1: (1.0 / eps > beta * eta).then(|| 1.0 / (1.0 / eps - beta * eta)),
            varpi_2: (1.0 - beta) * eps / beta,
            varpi_3: (1.0 - 2.0 * beta) / (beta * beta * eta),
            varpi_4: (d4 > 0.0).then(|| (1.0 - 2.0 * beta) / d4),
            zbar_1: positive_root(eps / beta - 1.0, (1.0 - beta) * eps / beta),
            zbar_2: positive_root(eps / beta - 1.0 / (beta * eta), eps / (beta * eta)),
            zbar_3: positive_root(beta * eta * eps + eps - 1.0, eps),
            series_tol: SERIES_TOL,
        };
        let all =
            [c.varpi_2, c.varpi_3, c.zbar_1, c.zbar_2, c.zbar_3, c.varpi_1.unwrap_or(0.0), c.varpi_4.unwrap_or(0.0)];
        if !all.iter().all(|x| x.is_finite()) {
            return Err(Error::config(format!("non-finite limit constants: {c:?}")));
        }
        Ok(c)
    }

    /// The same constants in the layout of [`RegimeConstants`], so the
    /// exact engine's regime dispatch applies unchanged.
    pub fn as_regime(&self) -> RegimeConstants {
        let (b, e) = (self.beta, self.eps_m);
        let k_1 = (1.0 - 2.0 * b) / ((1.0 - b) * b * e);
        RegimeConstants {
            beta: b,
            eta: self.eta,
            eps_m: e,
            alpha_m: e,
            omega_1: self.varpi_1,
            omega_2: self.varpi_2,
            omega_3: self.varpi_3,
            omega_4: self.varpi_4,
            z_1: self.zbar_1,
            z_2: self.zbar_2,
            z_3: self.zbar_3,
            k_1,
            k_2: (1.0 - b) / (b * b) + (1.0 - 2.0 * b) / (b * b * e),
            k_3: k_1 + (1.0 - 2.0 * b) / (b * b),
        }
    }

    fn phi(&self, x: f64) -> f64 {
        (x / self.eps_m - 1.0) / (self.beta * self.eta)
    }

    fn omega(&self, x: f64) -> f64 {
        (x / self.eps_m - 1.0) * (1.0 + x) / (self.beta * self.eta)
    }

    fn psi(&self, x: f64) -> f64 {
        let b = self.beta;
        ((1.0 - b) * (x + 1.0) - b) / (b * b * self.eta)
    }

    /// Scaled `Θ̄`, infinite at and beyond its pole `X = ε/β`.
    pub fn theta(&self, x: f64) -> f64 {
        let d = 1.0 - self.beta * x / self.eps_m;
        if d <= 0.0 {
            f64::INFINITY
        } else {
            (x / self.eps_m - 1.0) / (self.eta * d)
        }
    }

    fn polynomial_edge(&self, edge: Edge, x: f64) -> f64 {
        match edge {
            Edge::Phi => self.phi(x),
            Edge::Omega => self.omega(x),
            Edge::Psi => self.psi(x),
            Edge::Diagonal => x,
            Edge::Theta => unreachable!("Θ̄ is handled by its power series"),
        }
    }
}

/// A truncated series with its truncation record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Number of outer series terms summed.
    pub terms: usize,
    /// Estimated magnitude of the discarded tail.
    pub bound: f64,
}

/// `∫_a^b X^s Θ̄(X)^k dX` by expanding
/// `Θ̄^k = η^{−k} (X/ε − 1)^k Σ_j binom(k+j−1, j) (βX/ε)^j`:
///
/// `η^{−k} Σ_j binom(k+j−1, j) β^j ε^{−j} Σ_{q=0}^{k} binom(k,q)(−1)^{k−q} ε^{−q} (b^N − a^N)/N`,
/// with `N = s + q + j + 1`.
///
/// Summation over `j` stops once, for three consecutive terms, the
/// geometric bound on the remaining tail falls below `tol·|sum|`; the
/// series converges with ratio tending to `βb/ε`, which must be below one.
pub fn gamma5_series(a: f64, b: f64, s: u32, k: u32, c: &AsymptoticConstants, tol: f64) -> Result<SeriesValue> {
    if !(b > a) {
        return Ok(SeriesValue { value: 0.0, terms: 0, bound: 0.0 });
    }
    if !(a >= 0.0) {
        return Err(Error::argument(format!("series needs a ≥ 0, got {a}")));
    }
    let (beta, eps) = (c.beta, c.eps_m);
    let ratio_b = beta * b / eps;
    let ratio_a = beta * a / eps;
    if !(ratio_b < 1.0) {
        return Err(Error::SeriesFailure { partial: 0.0, bound: f64::INFINITY, terms: 0 });
    }
    let k = k as usize;
    let s = s as i32;
    // per q: binom(k,q)(−1)^{k−q} ε^{−q}; wb/wa carry binom(k+j−1,j) r^j
    let lead: Vec<f64> = (0..=k)
        .map(|q| binomial(k, q) * if (k - q).is_multiple_of(2) { 1.0 } else { -1.0 } * eps.powi(-(q as i32)))
        .collect();
    let pow_b: Vec<f64> = (0..=k).map(|q| b.powi(s + q as i32 + 1)).collect();
    let pow_a: Vec<f64> = (0..=k).map(|q| a.powi(s + q as i32 + 1)).collect();
    let (mut wb, mut wa) = (1.0, 1.0);
    let mut sum = NeumaierSum::new();
    let mut quiet = 0;
    let mut last = 0.0;
    for j in 0..SERIES_MAX_TERMS {
        if j > 0 {
            let f = (k + j - 1) as f64 / j as f64;
            wb *= f * ratio_b;
            wa *= f * ratio_a;
        }
        let mut term = 0.0;
        for q in 0..=k {
            let n = (s as usize + q + j + 1) as f64;
            term += lead[q] * (pow_b[q] * wb - pow_a[q] * wa) / n;
        }
        sum.add(term);
        last = term.abs();
        // later terms shrink at least by this factor once it is below one
        let step = ratio_b * (k + j) as f64 / (j + 1) as f64;
        let tail = if step < 1.0 { last * step / (1.0 - step) } else { f64::INFINITY };
        if tail < tol * sum.value().abs() {
            quiet += 1;
            if quiet == 3 {
                let scale = c.eta.powi(-(k as i32));
                return Ok(SeriesValue { value: scale * sum.value(), terms: j + 1, bound: scale * tail });
            }
        } else {
            quiet = 0;
        }
    }
    let scale = c.eta.powi(-(k as i32));
    Err(Error::SeriesFailure {
        partial: scale * sum.value(),
        bound: scale * last * ratio_b / (1.0 - ratio_b),
        terms: SERIES_MAX_TERMS,
    })
}

/// Leading-order coefficient of `P_T` and its strips (in scaled units).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticBreakdown {
    /// `κ` in `P_T ≈ κ ρ_m^{−order}`.
    pub coefficient: f64,
    /// Decay order `max(m, n)`.
    pub order: u32,
    pub regime: String,
    pub constants: AsymptoticConstants,
    pub strips: Vec<StripValue>,
}

impl AsymptoticBreakdown {
    /// `κ ρ_m^{−order}`.
    pub fn at(&self, rho_m: f64) -> f64 {
        self.coefficient * rho_m.powi(-(self.order as i32))
    }

    pub fn subevent(&self, subevent: &str) -> f64 {
        self.strips.iter().filter(|s| s.strip.subevent == subevent).map(|s| s.value).sum()
    }
}

struct Engine<'a> {
    c: &'a AsymptoticConstants,
    /// Ranks `(i, j)` with `i < j`.
    lo_rank: usize,
    hi_rank: usize,
    prefactor: f64,
    /// Outer variable is the smaller gain (`m < n`).
    legacy_smaller: bool,
    rule: Vec<(f64, f64)>,
}

impl Engine<'_> {
    /// `∫_a^b (contribution of edge e as an inner limit) dX`, without the
    /// density prefactor. The strip value is `F(upper) − F(lower)`.
    fn edge_integral(&self, edge: Edge, a: f64, b: f64) -> Result<f64> {
        let (i, j) = (self.lo_rank, self.hi_rank);
        let tol = self.c.series_tol;
        if self.legacy_smaller {
            // ∫_x^E (y − x)^{j−i−1} dy = (E − x)^{j−i}/(j−i), times x^{i−1}
            let k = j - i;
            if edge == Edge::Theta {
                let series = || -> Result<f64> {
                    let mut acc = NeumaierSum::new();
                    for q in 0..=k {
                        let sign = if (k - q) % 2 == 0 { 1.0 } else { -1.0 };
                        let g = gamma5_series(a, b, (i - 1 + k - q) as u32, q as u32, self.c, tol)?;
                        acc.add(sign * binomial(k, q) * g.value);
                    }
                    Ok(acc.value())
                };
                let direct = |x: f64| x.powi(i as i32 - 1) * (self.c.theta(x) - x).powi(k as i32);
                return Ok(self.series_or_quadrature(series, direct, a, b)? / k as f64);
            }
            Ok(self.legendre(a, b, |x| x.powi(i as i32 - 1) * (self.c.polynomial_edge(edge, x) - x).powi(k as i32))
                / k as f64)
        } else {
            // ∫_0^E x^{i−1}(y − x)^{j−i−1} dx = Σ_p binom(j−i−1,p)(−1)^p y^{j−i−1−p} E^{i+p}/(i+p)
            let r = j - i - 1;
            let inner = |y: f64, e: f64| {
                (0..=r)
                    .map(|p| {
                        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                        sign * binomial(r, p) * y.powi((r - p) as i32) * e.powi((i + p) as i32) / (i + p) as f64
                    })
                    .sum::<f64>()
            };
            if edge == Edge::Theta {
                let series = || -> Result<f64> {
                    let mut acc = NeumaierSum::new();
                    for p in 0..=r {
                        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                        let g = gamma5_series(a, b, (r - p) as u32, (i + p) as u32, self.c, tol)?;
                        acc.add(sign * binomial(r, p) * g.value / (i + p) as f64);
                    }
                    Ok(acc.value())
                };
                return self.series_or_quadrature(series, |y| inner(y, self.c.theta(y)), a, b);
            }
            Ok(self.legendre(a, b, |y| inner(y, self.c.polynomial_edge(edge, y))))
        }
    }

    /// The power series of a `Θ` edge, or, when `βb/ε` is so close to one
    /// that the series does not settle within its term budget, adaptive
    /// quadrature of the same integrand.
    fn series_or_quadrature<S, F>(&self, series: S, direct: F, a: f64, b: f64) -> Result<f64>
    where
        S: FnOnce() -> Result<f64>,
        F: FnMut(f64) -> f64,
    {
        match series() {
            Err(Error::SeriesFailure { .. }) => {
                let opts =
                    AdaptiveOptions { abs_tol: 1e-300, rel_tol: self.c.series_tol.max(1e-12), ..Default::default() };
                Ok(adaptive(direct, a, b, &[], &opts)?.value)
            }
            other => other,
        }
    }

    fn legendre<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self.rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
    }

    fn strip(&self, s: &Strip) -> Result<f64> {
        if !(s.b > s.a) {
            return Ok(0.0);
        }
        let hi = self.edge_integral(s.upper, s.a, s.b)?;
        let lo = self.edge_integral(s.lower, s.a, s.b)?;
        Ok(self.prefactor * (hi - lo))
    }
}

/// Leading-order coefficient of `P_T` for `cfg`'s `β`, `R_m`, `η`.
pub fn asymptotic_breakdown(cfg: &SystemConfig) -> Result<AsymptoticBreakdown> {
    let c = AsymptoticConstants::new(cfg)?;
    let regime = c.as_regime();
    let legacy_smaller = cfg.m < cfg.n;
    let pair = OrderPairDensity::new(cfg.users, cfg.m, cfg.n)?;
    let (i, j) = pair.ranks();
    let engine = Engine {
        c: &c,
        lo_rank: i,
        hi_rank: j,
        prefactor: pair.prefactor(),
        legacy_smaller,
        // integrands have degree ≤ 2j, so j + 1 nodes integrate them exactly
        rule: gauss_legendre(j + 1),
    };
    let strips = strips(cfg, &regime)?
        .into_iter()
        .map(|strip| Ok(StripValue { strip, value: engine.strip(&strip)? }))
        .collect::<Result<Vec<_>>>()?;
    let coefficient = strips.iter().map(|s| s.value).sum::<f64>().max(0.0);
    Ok(AsymptoticBreakdown {
        coefficient,
        order: j as u32,
        regime: regime.regime_tag(legacy_smaller),
        constants: c,
        strips,
    })
}

/// High-SNR approximation `κ ρ_m^{−max(m,n)}` of `P_T` at `cfg.rho_m`,
/// capped at one (the raw value exceeds it at low SNR).
pub fn p_t_asymptotic(cfg: &SystemConfig) -> Result<ProbEstimate> {
    let b = asymptotic_breakdown(cfg)?;
    Ok(ProbEstimate::asymptotic(b.at(cfg.rho_m).min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::compute_constants;

    fn cfg(m: usize, n: usize, eta: f64) -> SystemConfig {
        SystemConfig::at_snr_db(5, m, n, 1.0, 0.2, 30.0, eta).unwrap()
    }

    #[test]
    fn limits_are_scaled_finite_snr_constants() {
        for (m, n, eta) in [(1, 2, 0.5), (2, 1, 5.0), (2, 4, 40.0)] {
            let cfg = cfg(m, n, eta);
            let a = AsymptoticConstants::new(&cfg).unwrap();
            let f = compute_constants(&cfg).unwrap();
            let r = cfg.rho_m;
            for (lim, fin) in [
                (a.zbar_1, f.z_1),
                (a.zbar_2, f.z_2),
                (a.zbar_3, f.z_3),
                (a.varpi_2, f.omega_2),
                (a.varpi_3, f.omega_3),
            ] {
                assert!((lim - r * fin).abs() < 1e-10 * lim, "{lim} vs {}", r * fin);
            }
        }
    }

    #[test]
    fn limit_roots_satisfy_their_quadratics() {
        let a = AsymptoticConstants::new(&cfg(1, 2, 3.0)).unwrap();
        let (b, e, h) = (a.beta, a.eps_m, a.eta);
        let q1 = a.zbar_1 * a.zbar_1 - (e / b - 1.0) * a.zbar_1 - (1.0 - b) * e / b;
        let q2 = a.zbar_2 * a.zbar_2 - (e / b - 1.0 / (b * h)) * a.zbar_2 - e / (b * h);
        let q3 = a.zbar_3 * a.zbar_3 - (b * h * e + e - 1.0) * a.zbar_3 - e;
        for q in [q1, q2, q3] {
            assert!(q.abs() < 1e-10);
        }
        assert!((a.theta(a.zbar_2) - a.zbar_2).abs() < 1e-10 * a.zbar_2);
    }

    #[test]
    fn empty_series_interval_is_zero() {
        let a = AsymptoticConstants::new(&cfg(1, 2, 3.0)).unwrap();
        let v = gamma5_series(1.2, 1.2, 2, 3, &a, 1e-12).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn series_past_the_pole_fails() {
        let a = AsymptoticConstants::new(&cfg(1, 2, 3.0)).unwrap();
        let pole = a.eps_m / a.beta;
        assert!(matches!(gamma5_series(0.5, 1.1 * pole, 0, 2, &a, 1e-12), Err(Error::SeriesFailure { .. })));
    }
}
