//! Closed-form probability of the power-adaptation failure event.
//!
//! Every sub-event is a strip `u_1 < u < u_2`, `lo(u) < v < hi(u)` between
//! two boundary curves. Expanding the pair density into exponential terms
//! `c e^{−o u − i v}` (`o`, `i` the outer and inner rates), the inner
//! integral is `(e^{−i lo} − e^{−i hi})/i` and each outer integral is one
//! of:
//!
//! * linear curve (`Φ`, `Ψ`, diagonal) — an exponential difference,
//! * `Ω` (quadratic) — a Gaussian integral in error functions,
//! * `Θ` (rational) — Gauss–Chebyshev quadrature.
//!
//! The expansion alternates in sign and its terms dwarf the result at high
//! SNR, so the engine is generic over [`Real`] and runs in double-double by
//! default.

use serde::Serialize;

use super::constants::{compute_constants, RegimeConstants};
use crate::channel::OrderPairDensity;
use crate::error::{Error, Result};
use crate::numerics::{ChebyshevRule, DoubleDouble, NodeMode, Real};
use crate::prob::ProbEstimate;
use crate::schemes::SystemConfig;

/// `Γ_1(a, b, c, d) = ∫_a^b e^{−c x² − d x} dx`
/// `= e^{d²/(4c)} √π/(2√c) [erf(√c (b + d/(2c))) − erf(√c (a + d/(2c)))]`.
pub fn gamma1<T: Real>(a: T, b: T, c: T, d: T) -> Result<T> {
    if !(c > T::zero()) {
        return Err(Error::argument(format!("gaussian integral needs c > 0, got {c:?}")));
    }
    Ok(gaussian_strip(a, b, c, d, T::zero()))
}

/// `e^{s} ∫_a^b e^{−c x² − d x} dx` for `c > 0`.
///
/// When the interval lies on one side of the vertex `−d/(2c)` the
/// erf-difference is rewritten with the scaled complementary error
/// function, so nothing overflows however large `d²/(4c)` gets.
pub fn gaussian_strip<T: Real>(a: T, b: T, c: T, d: T, s: T) -> T {
    gaussian_parts(a, b, c, d, s).0
}

/// [`gaussian_strip`] together with the combined magnitude of the two
/// pieces it subtracts, the scale of its rounding error.
fn gaussian_parts<T: Real>(a: T, b: T, c: T, d: T, s: T) -> (T, T) {
    if !(b > a) {
        return (T::zero(), T::zero());
    }
    let two = T::from_f64(2.0);
    let sc = c.sqrt();
    let mu = d / (two * c);
    let lo = sc * (a + mu);
    let hi = sc * (b + mu);
    let scale = T::pi().sqrt() / (two * sc);
    // exponent of the integrand at x; an infinite end contributes nothing
    let g = |x: T| if x.to_f64().is_finite() { s - c * x * x - d * x } else { T::from_f64(f64::NEG_INFINITY) };
    let (p, q) = if lo >= T::zero() {
        (g(a).exp() * lo.erfcx(), g(b).exp() * hi.erfcx())
    } else if hi <= T::zero() {
        (g(b).exp() * (-hi).erfcx(), g(a).exp() * (-lo).erfcx())
    } else {
        let e = (s + c * mu * mu).exp();
        (e * hi.erf(), e * lo.erf())
    };
    (scale * (p - q), scale * (p.abs() + q.abs()))
}

/// A boundary curve of a strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Edge {
    Phi,
    Omega,
    Theta,
    Psi,
    Diagonal,
}

/// One closed-form term: the strip `a < u < b` between `lower` and `upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Strip {
    /// Sub-event label, e.g. `T1,2`.
    pub subevent: &'static str,
    /// Term name, e.g. `S_3`.
    pub term: &'static str,
    pub lower: Edge,
    pub upper: Edge,
    pub a: f64,
    pub b: f64,
}

impl Strip {
    fn new(subevent: &'static str, term: &'static str, lower: Edge, upper: Edge, a: f64, b: f64) -> Self {
        Self { subevent, term, lower, upper, a, b }
    }
}

/// The strips making up the power-adaptation event for `cfg`, chosen by
/// the regime columns of `consts`. Sub-events that vanish in the current
/// regime are omitted.
pub fn strips(cfg: &SystemConfig, consts: &RegimeConstants) -> Result<Vec<Strip>> {
    use Edge::*;
    let c = consts;
    let alpha = c.alpha_m;
    let omega_4 = || c.omega_4.ok_or_else(|| Error::config("regime requires ω_4 but β²ρ_n ≤ (1−β)ρ_m"));
    let mut out = Vec::new();
    if cfg.m < cfg.n {
        let first = c.first_column(true);
        let omega_1 = c.omega_1_or_inf();
        if first == 0 {
            out.push(Strip::new("T1,1", "S_1", Phi, Omega, omega_1, c.omega_2));
            out.push(Strip::new("T1,2", "S_2", Theta, Omega, c.omega_2, c.z_1));
            out.push(Strip::new("T1,3", "S_4", Diagonal, Omega, c.z_3, omega_1));
        } else {
            out.push(Strip::new("T1,2", "S_3", Theta, Omega, c.z_2, c.z_1));
            out.push(Strip::new("T1,3", "S_5", Diagonal, Omega, c.z_3, c.z_2));
        }
        match c.second_column() {
            0 => out.push(Strip::new("T2,1", "S_6", Diagonal, Psi, alpha, c.z_3)),
            1 => out.push(Strip::new("T2,1", "S_7", Diagonal, Psi, alpha, c.z_3.min(omega_4()?))),
            _ => {}
        }
        out.push(Strip::new("T2,2", "S_8", Omega, Psi, c.z_3, c.z_1));
    } else {
        let first = c.first_column(false);
        match first {
            0 => {
                out.push(Strip::new("T1,1'", "V_1", Phi, Omega, alpha, c.z_3));
                out.push(Strip::new("T1,2'", "V_3", Phi, Diagonal, c.z_3, c.omega_1_or_inf()));
            }
            1 => {
                out.push(Strip::new("T1,1'", "V_1", Phi, Omega, alpha, c.z_3));
                out.push(Strip::new("T1,2'", "V_4", Phi, Diagonal, c.z_3, c.omega_2));
                out.push(Strip::new("T1,4'", "V_6", Theta, Diagonal, c.omega_2, c.z_2));
            }
            _ => {
                out.push(Strip::new("T1,1'", "V_2", Phi, Omega, alpha, c.omega_2));
                out.push(Strip::new("T1,3'", "V_5", Theta, Omega, c.omega_2, c.z_1.min(c.z_3)));
                out.push(Strip::new("T1,4'", "V_7", Theta, Diagonal, c.z_3, c.z_2));
            }
        }
        match c.second_column() {
            0 => out.push(Strip::new("T2,1'", "V_8", Omega, Diagonal, alpha, c.z_3)),
            1 => {
                let w4 = omega_4()?;
                out.push(Strip::new("T2,1'", "V_9", Omega, Diagonal, alpha, c.z_3.min(w4)));
                out.push(Strip::new("T2,2'", "V_10", Omega, Psi, w4, c.z_1));
            }
            _ => out.push(Strip::new("T2,2'", "V_11", Omega, Psi, alpha, c.z_1)),
        }
    }
    Ok(out)
}

/// How the exact engine evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Gauss–Chebyshev node count for the `Θ` strips.
    pub n_c: usize,
    pub nodes: NodeMode,
    /// Evaluate in double-double (default) or plain `f64`.
    pub extended: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { n_c: 256, nodes: NodeMode::Smoothed, extended: true }
    }
}

/// Value of one strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripValue {
    pub strip: Strip,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactBreakdown {
    pub value: f64,
    /// Estimated absolute rounding error of `value`.
    pub rounding_floor: f64,
    pub regime: String,
    pub strips: Vec<StripValue>,
}

impl ExactBreakdown {
    /// Total of the strips belonging to `subevent`.
    pub fn subevent(&self, subevent: &str) -> f64 {
        self.strips.iter().filter(|s| s.strip.subevent == subevent).map(|s| s.value).sum()
    }
}

/// One exponential term of the density in outer/inner form.
#[derive(Debug, Clone, Copy)]
struct Term {
    coeff: f64,
    outer: f64,
    inner: f64,
}

fn terms(cfg: &SystemConfig) -> Result<Vec<Term>> {
    let pair = OrderPairDensity::new(cfg.users, cfg.m, cfg.n)?;
    let legacy_smaller = cfg.m < cfg.n;
    Ok(pair
        .series_terms()
        .into_iter()
        .map(|t| {
            // the legacy gain is the smaller of the two when m < n
            let (outer, inner) = if legacy_smaller { (t.x_rate, t.y_rate) } else { (t.y_rate, t.x_rate) };
            Term { coeff: t.coeff, outer, inner }
        })
        .collect())
}

/// Curve coefficients lifted into `T`.
struct Kernel<T> {
    a: T,
    beta: T,
    rho_n: T,
    rho_m: T,
}

impl<T: Real> Kernel<T> {
    fn new(cfg: &SystemConfig) -> Self {
        let eps = T::from_f64(cfg.rate_m.exp2()) - T::one();
        let rho_m = T::from_f64(cfg.rho_m);
        Self { a: rho_m / eps, beta: T::from_f64(cfg.beta), rho_n: T::from_f64(cfg.rho_n), rho_m }
    }

    /// Slope and intercept of a linear edge.
    fn linear(&self, edge: Edge) -> Option<(T, T)> {
        let one = T::one();
        let b = self.beta;
        match edge {
            Edge::Diagonal => Some((one, T::zero())),
            Edge::Phi => Some((self.a / (b * self.rho_n), -(one / (b * self.rho_n)))),
            Edge::Psi => {
                let d = b * b * self.rho_n;
                Some(((one - b) * self.rho_m / d, (one - b - b) / d))
            }
            Edge::Omega | Edge::Theta => None,
        }
    }

    fn eval(&self, edge: Edge, u: T) -> T {
        let one = T::one();
        match edge {
            Edge::Omega => (self.a * u - one) * (one + self.rho_m * u) / (self.beta * self.rho_n),
            Edge::Theta => (self.a * u - one) / ((one - self.beta * self.a * u) * self.rho_n),
            _ => {
                let (k, c) = self.linear(edge).expect("linear edge");
                k * u + c
            }
        }
    }

    /// `∫_{u1}^{u2} e^{−o u − i e(u)} du` for a non-`Θ` edge, with the
    /// magnitude of the pieces it subtracts.
    fn closed(&self, edge: Edge, o: T, i: T, u1: T, u2: T) -> (T, T) {
        if let Some((k, c)) = self.linear(edge) {
            let rate = o + i * k;
            let at = |u: T| (-(o * u) - i * (k * u + c)).exp();
            let (p, q) = (at(u1), at(u2));
            return ((p - q) / rate, (p + q) / rate.abs());
        }
        debug_assert_eq!(edge, Edge::Omega);
        let bp = self.beta * self.rho_n;
        let c2 = i * self.a * self.rho_m / bp;
        let c1 = o + i * (self.a - self.rho_m) / bp;
        gaussian_parts(u1, u2, c2, c1, i / bp)
    }
}

/// Value of one strip and the summed magnitude of everything that was
/// cancelled to produce it.
fn strip_value<T: Real>(k: &Kernel<T>, terms: &[Term], strip: &Strip, rule: &ChebyshevRule) -> (T, T) {
    if !(strip.b > strip.a) {
        return (T::zero(), T::zero());
    }
    let (u1, u2) = (T::from_f64(strip.a), T::from_f64(strip.b));
    // A Θ edge forces quadrature of the whole strip: the two edge integrals
    // are each far larger than their difference, so only the pointwise
    // difference can be integrated to full relative accuracy.
    let quadrature = strip.lower == Edge::Theta || strip.upper == Edge::Theta;
    let by_quadrature = |_: Edge| quadrature;
    let mut total = T::zero();
    let mut magnitude = T::zero();
    // closed-form parts
    for t in terms {
        let weight = T::from_f64(t.coeff) / T::from_f64(t.inner);
        let (o, i) = (T::from_f64(t.outer), T::from_f64(t.inner));
        for (edge, sign) in [(strip.lower, T::one()), (strip.upper, -T::one())] {
            if !by_quadrature(edge) {
                let (v, m) = k.closed(edge, o, i, u1, u2);
                total += sign * weight * v;
                magnitude += weight.abs() * m;
            }
        }
    }
    // quadrature parts, summed over terms at each node so the rule is
    // applied once to the total integrand
    if by_quadrature(strip.lower) || by_quadrature(strip.upper) {
        let lo_q = by_quadrature(strip.lower);
        let hi_q = by_quadrature(strip.upper);
        let node = |u: T, absolute: bool| {
            let lo = lo_q.then(|| k.eval(strip.lower, u));
            let hi = hi_q.then(|| k.eval(strip.upper, u));
            let mut acc = T::zero();
            for t in terms {
                let (o, i) = (T::from_f64(t.outer), T::from_f64(t.inner));
                let weight = T::from_f64(t.coeff) / i;
                let p = lo.map_or(T::zero(), |lo| (-(o * u) - i * lo).exp());
                let q = hi.map_or(T::zero(), |hi| (-(o * u) - i * hi).exp());
                acc += if absolute { weight.abs() * (p + q) } else { weight * (p - q) };
            }
            acc
        };
        total += rule.integrate(|u| node(u, false), u1, u2);
        magnitude += rule.integrate(|u| node(u, true), u1, u2);
    }
    (total, magnitude)
}

fn evaluate<T: Real>(cfg: &SystemConfig, strips: &[Strip], rule: &ChebyshevRule) -> Result<(Vec<f64>, f64)> {
    let k = Kernel::<T>::new(cfg);
    let terms = terms(cfg)?;
    let mut floor = 0.0;
    let values = strips
        .iter()
        .map(|s| {
            let (v, m) = strip_value(&k, &terms, s, rule);
            floor += m.to_f64();
            v.to_f64()
        })
        .collect();
    // a few ulps per cancelled piece
    Ok((values, 8.0 * T::EPSILON * floor))
}

/// Safety factor on the running rounding estimate of the double-double
/// evaluation.
const ROUNDING_SAFETY: f64 = 16.0;

/// Every strip of the power-adaptation event with its value.
///
/// The reported `rounding_floor` estimates the absolute error left by
/// cancellation between expansion terms. In plain `f64` it is the
/// worst-case bound of a few ulps per cancelled piece. In double-double
/// that bound is far too pessimistic, because the rounding errors of
/// neighbouring terms cancel along with the terms themselves. The engine
/// therefore also evaluates in `f64`. Its deviation from the double-double
/// result, scaled by the 53 extra bits and a safety factor, is the
/// reported floor.
pub fn p_t_breakdown(cfg: &SystemConfig, opts: &ExactOptions) -> Result<ExactBreakdown> {
    if opts.n_c < 16 {
        return Err(Error::argument(format!("node count must be at least 16, got {}", opts.n_c)));
    }
    let consts = compute_constants(cfg)?;
    let strips = strips(cfg, &consts)?;
    let rule = ChebyshevRule::new(opts.n_c, opts.nodes);
    let (values, rounding_floor) = if opts.extended {
        let (values, _) = evaluate::<DoubleDouble>(cfg, &strips, &rule)?;
        let (plain, _) = evaluate::<f64>(cfg, &strips, &rule)?;
        let deviation: f64 = values.iter().zip(&plain).map(|(a, b)| (a - b).abs()).sum();
        let total: f64 = values.iter().sum();
        let extra_bits = 2f64.powi(-53);
        (values, ROUNDING_SAFETY * (extra_bits * deviation + DoubleDouble::EPSILON * total.abs()))
    } else {
        evaluate::<f64>(cfg, &strips, &rule)?
    };
    let strips: Vec<StripValue> =
        strips.into_iter().zip(values).map(|(strip, value)| StripValue { strip, value }).collect();
    let value = strips.iter().map(|s| s.value).sum();
    Ok(ExactBreakdown { value, rounding_floor, regime: consts.regime_tag(cfg.m < cfg.n), strips })
}

/// Largest rounding floor, relative to the value, that [`p_t_exact`]
/// accepts.
pub const MAX_RELATIVE_FLOOR: f64 = 1e-2;

/// Closed-form probability of the power-adaptation failure event, using
/// `n_c` quadrature nodes and double-double evaluation.
///
/// Fails with [`Error::PrecisionLoss`] once cancellation in the expansion
/// leaves the value unresolved, which happens for large `max(m, n)` at
/// very high SNR; the asymptotic form takes over there.
pub fn p_t_exact(cfg: &SystemConfig, consts: &RegimeConstants, n_c: usize) -> Result<ProbEstimate> {
    if (consts.eta - cfg.eta()).abs() > 1e-12 * cfg.eta() {
        return Err(Error::argument("constants were computed for a different configuration"));
    }
    let b = p_t_breakdown(cfg, &ExactOptions { n_c, ..Default::default() })?;
    if b.rounding_floor > MAX_RELATIVE_FLOOR * b.value.abs() {
        return Err(Error::PrecisionLoss { partial: b.value, floor: b.rounding_floor });
    }
    Ok(ProbEstimate::exact(b.value.clamp(0.0, 1.0)))
}
