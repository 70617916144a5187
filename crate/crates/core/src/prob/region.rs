//! Event regions in the `(g_m, g_n)` plane and their direct integration
//! against the order-statistic pair density.
//!
//! A region is a disjoint union of [`Piece`]s. Each piece fixes a range of
//! the legacy user's gain `u = g_m` and bounds the opportunistic user's gain
//! `v = g_n` between the largest of some lower curves and the smallest of
//! some upper curves, optionally only where given curve comparisons hold.
//! The ordering `v > u` (for `m < n`) or `v < u` (for `m > n`) is applied by
//! the integrator, so regions can be shared by both orderings.

use std::cell::Cell;

use rayon::prelude::*;

use super::estimate::ProbEstimate;
use crate::channel::OrderPairDensity;
use crate::error::{Error, Result};
use crate::numerics::{adaptive, AdaptiveOptions};
use crate::schemes::{Scheme, SystemConfig};

/// Boundary curves of the failure regions, as functions of `u = g_m`.
///
/// With `a = ρ_m/ε_m` (so `τ_m = a u − 1` above `α_m = 1/a`):
///
/// * `Φ(u) = (a u − 1)/(β ρ_n)` — interference budget reached (Type I edge),
/// * `Ω(u) = (a u − 1)(1 + ρ_m u)/(β ρ_n)` — the two Type II rates tie,
/// * `Θ(u) = (a u − 1)/((1 − β a u) ρ_n)` — power-scaled rate equals the
///   OMA break-even, `+∞` once `β a u ≥ 1`,
/// * `Ψ(u) = ((1 − β)(ρ_m u + 1) − β)/(β² ρ_n)` — full-power rate equals
///   the OMA break-even,
/// * `ω_3 = (1 − 2β)/(β² ρ_n)` — Type I break-even.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curves {
    pub a: f64,
    pub beta: f64,
    pub rho_n: f64,
    pub rho_m: f64,
}

impl Curves {
    pub fn new(cfg: &SystemConfig) -> Self {
        Self { a: cfg.rho_m / cfg.epsilon_m(), beta: cfg.beta, rho_n: cfg.rho_n, rho_m: cfg.rho_m }
    }

    pub fn alpha(&self) -> f64 {
        1.0 / self.a
    }

    pub fn phi(&self, u: f64) -> f64 {
        (self.a * u - 1.0) / (self.beta * self.rho_n)
    }

    pub fn omega(&self, u: f64) -> f64 {
        (self.a * u - 1.0) * (1.0 + self.rho_m * u) / (self.beta * self.rho_n)
    }

    pub fn theta(&self, u: f64) -> f64 {
        let d = 1.0 - self.beta * self.a * u;
        if d > 0.0 {
            (self.a * u - 1.0) / (d * self.rho_n)
        } else {
            f64::INFINITY
        }
    }

    pub fn psi(&self, u: f64) -> f64 {
        let b = self.beta;
        ((1.0 - b) * (self.rho_m * u + 1.0) - b) / (b * b * self.rho_n)
    }

    pub fn omega3(&self) -> f64 {
        let b = self.beta;
        (1.0 - 2.0 * b) / (b * b * self.rho_n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Zero,
    Const(f64),
    /// `v = u`.
    Diagonal,
    Phi,
    Omega,
    Theta,
    Psi,
    /// The constant `ω_3`.
    Omega3,
    Infinity,
}

impl Curve {
    pub fn eval(self, c: &Curves, u: f64) -> f64 {
        match self {
            Curve::Zero => 0.0,
            Curve::Const(x) => x,
            Curve::Diagonal => u,
            Curve::Phi => c.phi(u),
            Curve::Omega => c.omega(u),
            Curve::Theta => c.theta(u),
            Curve::Psi => c.psi(u),
            Curve::Omega3 => c.omega3(),
            Curve::Infinity => f64::INFINITY,
        }
    }
}

/// `{u_lo < u < u_hi, all when-conditions, max(lower) < v < min(upper)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub u_lo: f64,
    pub u_hi: f64,
    pub lower: Vec<Curve>,
    pub upper: Vec<Curve>,
    /// Each pair `(f, g)` requires `f(u) > g(u)`.
    pub when: Vec<(Curve, Curve)>,
}

impl Piece {
    pub fn new(u_lo: f64, u_hi: f64, lower: &[Curve], upper: &[Curve]) -> Self {
        Self { u_lo, u_hi, lower: lower.to_vec(), upper: upper.to_vec(), when: Vec::new() }
    }

    pub fn when(mut self, conds: &[(Curve, Curve)]) -> Self {
        self.when.extend_from_slice(conds);
        self
    }

    fn active(&self, c: &Curves, u: f64) -> bool {
        u > self.u_lo && u < self.u_hi && self.when.iter().all(|(f, g)| f.eval(c, u) > g.eval(c, u))
    }

    fn v_bounds(&self, c: &Curves, u: f64) -> (f64, f64) {
        let lo = self.lower.iter().map(|k| k.eval(c, u)).fold(f64::NEG_INFINITY, f64::max);
        let hi = self.upper.iter().map(|k| k.eval(c, u)).fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    fn curves(&self) -> impl Iterator<Item = Curve> + '_ {
        self.lower.iter().chain(&self.upper).copied().chain(self.when.iter().flat_map(|(f, g)| [*f, *g]))
    }
}

/// Sub-event labels of the power-adaptation failure event when `m < n`.
pub const SUBEVENTS_M_LT_N: [&str; 5] = ["T1,1", "T1,2", "T1,3", "T2,1", "T2,2"];
/// Sub-event labels when `m > n`.
pub const SUBEVENTS_M_GT_N: [&str; 6] = ["T1,1'", "T1,2'", "T1,3'", "T1,4'", "T2,1'", "T2,2'"];

#[derive(Debug, Clone, PartialEq)]
pub struct EventRegion {
    pub curves: Curves,
    pub pieces: Vec<Piece>,
}

impl EventRegion {
    pub fn new(curves: Curves, pieces: Vec<Piece>) -> Self {
        Self { curves, pieces }
    }

    /// The whole plane.
    pub fn everything(cfg: &SystemConfig) -> Self {
        Self::new(Curves::new(cfg), vec![Piece::new(0.0, f64::INFINITY, &[Curve::Zero], &[Curve::Infinity])])
    }

    /// `{g_m < x}`.
    pub fn outer_below(cfg: &SystemConfig, x: f64) -> Self {
        Self::new(Curves::new(cfg), vec![Piece::new(0.0, x, &[Curve::Zero], &[Curve::Infinity])])
    }

    /// Failure through the Type I branch: `u > α_m`, `v ≤ min(Φ, ω_3)`.
    pub fn type_one(cfg: &SystemConfig) -> Self {
        let c = Curves::new(cfg);
        Self::new(c, vec![Piece::new(c.alpha(), f64::INFINITY, &[Curve::Zero], &[Curve::Phi, Curve::Omega3])])
    }

    /// Failure with no interference budget: `u < α_m`, `v ≤ Ψ`.
    pub fn no_budget(cfg: &SystemConfig) -> Self {
        let c = Curves::new(cfg);
        Self::new(c, vec![Piece::new(0.0, c.alpha(), &[Curve::Zero], &[Curve::Psi])])
    }

    /// Power-adaptation failure: `u > α_m`, `max(Φ, Θ) < v ≤ Ψ`.
    pub fn power_adaptation(cfg: &SystemConfig) -> Self {
        let c = Curves::new(cfg);
        Self::new(c, vec![Piece::new(c.alpha(), f64::INFINITY, &[Curve::Phi, Curve::Theta], &[Curve::Psi])])
    }

    /// The same event split where the two Type II rates tie:
    /// `max(Φ, Θ) < v < Ω` (power-scaled branch chosen) and
    /// `Ω < v < Ψ` (full-power branch chosen), for `α_m < u < α_m/β`.
    pub fn power_adaptation_split(cfg: &SystemConfig) -> Self {
        let c = Curves::new(cfg);
        let (lo, hi) = (c.alpha(), c.alpha() / c.beta);
        Self::new(
            c,
            vec![
                Piece::new(lo, hi, &[Curve::Phi, Curve::Theta], &[Curve::Omega]),
                Piece::new(lo, hi, &[Curve::Phi, Curve::Omega], &[Curve::Psi]),
            ],
        )
    }

    /// The power-adaptation failure event cut into the sub-events of the
    /// closed-form analysis, labelled as in [`SUBEVENTS_M_LT_N`] and
    /// [`SUBEVENTS_M_GT_N`].
    pub fn power_adaptation_subevents(cfg: &SystemConfig) -> Vec<(&'static str, EventRegion)> {
        use Curve::*;
        let c = Curves::new(cfg);
        let lo = c.alpha();
        let piece = |lower: Curve, upper: Curve, when: &[(Curve, Curve)]| {
            EventRegion::new(c, vec![Piece::new(lo, f64::INFINITY, &[lower], &[upper]).when(when)])
        };
        if cfg.m < cfg.n {
            vec![
                ("T1,1", piece(Phi, Omega, &[(Phi, Diagonal), (Phi, Theta)])),
                ("T1,2", piece(Theta, Omega, &[(Theta, Diagonal), (Theta, Phi)])),
                ("T1,3", piece(Diagonal, Omega, &[(Diagonal, Phi), (Diagonal, Theta)])),
                ("T2,1", piece(Diagonal, Psi, &[(Diagonal, Omega)])),
                ("T2,2", piece(Omega, Psi, &[(Omega, Diagonal)])),
            ]
        } else {
            vec![
                ("T1,1'", piece(Phi, Omega, &[(Phi, Theta), (Diagonal, Omega)])),
                ("T1,2'", piece(Phi, Diagonal, &[(Phi, Theta), (Omega, Diagonal)])),
                ("T1,3'", piece(Theta, Omega, &[(Theta, Phi), (Diagonal, Omega)])),
                ("T1,4'", piece(Theta, Diagonal, &[(Theta, Phi), (Omega, Diagonal)])),
                ("T2,1'", piece(Omega, Diagonal, &[(Psi, Diagonal)])),
                ("T2,2'", piece(Omega, Psi, &[(Diagonal, Psi)])),
            ]
        }
    }

    /// Draws on which `scheme` fails to beat OMA.
    pub fn failure(cfg: &SystemConfig, scheme: Scheme) -> Self {
        let c = Curves::new(cfg);
        let alpha = c.alpha();
        let inf = f64::INFINITY;
        let pieces = match scheme {
            Scheme::Oma => return Self::everything(cfg),
            Scheme::Fsic => vec![Piece::new(0.0, inf, &[Curve::Zero], &[Curve::Psi])],
            Scheme::HsicNpa => vec![
                Piece::new(0.0, alpha, &[Curve::Zero], &[Curve::Psi]),
                Piece::new(alpha, inf, &[Curve::Phi], &[Curve::Psi]),
                Piece::new(alpha, inf, &[Curve::Zero], &[Curve::Phi, Curve::Omega3]),
            ],
            Scheme::HsicPa => {
                let mut p = Self::no_budget(cfg).pieces;
                p.extend(Self::type_one(cfg).pieces);
                p.extend(Self::power_adaptation(cfg).pieces);
                p
            }
        };
        Self::new(c, pieces)
    }

    /// Pointwise membership, without the order constraint.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.pieces.iter().any(|p| {
            if !p.active(&self.curves, u) {
                return false;
            }
            let (lo, hi) = p.v_bounds(&self.curves, u);
            v > lo && v < hi
        })
    }

    /// Values of `u` in `(lo, hi)` where two of the piece's curves (or the
    /// diagonal) cross, located by a log-spaced scan plus bisection.
    fn crossings(&self, piece: &Piece, lo: f64, hi: f64) -> Vec<f64> {
        let c = &self.curves;
        let mut curves: Vec<Curve> = piece.curves().chain([Curve::Diagonal]).collect();
        curves.dedup();
        let mut grid: Vec<f64> = (0..=600).map(|k| hi * 10f64.powf(-(k as f64) / 40.0)).filter(|&u| u > lo).collect();
        grid.push(lo.max(hi * 1e-15));
        grid.reverse();
        let mut out = Vec::new();
        for (i, f) in curves.iter().enumerate() {
            for g in &curves[i + 1..] {
                let diff = |u: f64| {
                    let (a, b) = (f.eval(c, u), g.eval(c, u));
                    if a == b {
                        0.0
                    } else if a.is_infinite() || b.is_infinite() {
                        if a > b {
                            1.0
                        } else {
                            -1.0
                        }
                    } else {
                        a - b
                    }
                };
                for w in grid.windows(2) {
                    let (mut x0, mut x1) = (w[0], w[1]);
                    let (s0, s1) = (diff(x0).signum(), diff(x1).signum());
                    if s0 == s1 || s0 == 0.0 {
                        continue;
                    }
                    for _ in 0..200 {
                        let mid = 0.5 * (x0 + x1);
                        if mid <= x0 || mid >= x1 {
                            break;
                        }
                        if diff(mid).signum() == s0 {
                            x0 = mid;
                        } else {
                            x1 = mid;
                        }
                    }
                    out.push(0.5 * (x0 + x1));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Both gains are truncated at this value.
    pub bound: f64,
    pub max_depth: u32,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-7, rel_tol: 1e-8, bound: 40.0, max_depth: 40 }
    }
}

/// Probability of `region` under the joint law of `(g_m, g_n)`.
///
/// Nested adaptive Gauss–Kronrod: the inner integral over `v` is smooth; the
/// outer integrand in `u` has kinks and jumps only where boundary curves
/// cross, and those points are handed to the outer integrator as breaks.
pub fn integrate_event(region: &EventRegion, pair: &OrderPairDensity, opts: &IntegrateOptions) -> Result<ProbEstimate> {
    let legacy_smaller = pair.m() < pair.n();
    let outer = AdaptiveOptions {
        abs_tol: opts.abs_tol,
        rel_tol: opts.rel_tol,
        max_depth: opts.max_depth,
        max_intervals: 4000,
    };
    let inner = AdaptiveOptions {
        abs_tol: 1e-2 * opts.abs_tol / opts.bound,
        rel_tol: 1e-2 * opts.rel_tol,
        max_depth: opts.max_depth,
        max_intervals: 4000,
    };
    let c = region.curves;

    let parts: Vec<Result<(f64, f64)>> = region
        .pieces
        .par_iter()
        .map(|piece| {
            let lo = piece.u_lo.max(0.0);
            let hi = piece.u_hi.min(opts.bound);
            if !(hi > lo) {
                return Ok((0.0, 0.0));
            }
            let mut breaks = region.crossings(piece, lo, hi);
            breaks.extend((-12..=1).map(|k| 10f64.powi(k)));
            breaks.extend([c.alpha(), c.alpha() / c.beta]);
            let failure = Cell::new(None);
            let h = |u: f64| {
                if !piece.active(&c, u) {
                    return 0.0;
                }
                let (mut v_lo, mut v_hi) = piece.v_bounds(&c, u);
                if legacy_smaller {
                    v_lo = v_lo.max(u);
                } else {
                    v_hi = v_hi.min(u);
                }
                v_lo = v_lo.max(0.0);
                v_hi = v_hi.min(opts.bound);
                if !(v_hi > v_lo) {
                    return 0.0;
                }
                let density = |v: f64| if legacy_smaller { pair.joint_pdf(u, v) } else { pair.joint_pdf(v, u) };
                match adaptive(density, v_lo, v_hi, &[], &inner) {
                    Ok(r) => r.value,
                    Err(e) => {
                        failure.set(Some(e));
                        0.0
                    }
                }
            };
            let r = adaptive(h, lo, hi, &breaks, &outer)?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok((r.value, r.error + inner.abs_tol * (hi - lo)))
        })
        .collect();

    let mut value = 0.0;
    let mut error = 0.0;
    for part in parts {
        match part {
            Ok((v, e)) => {
                value += v;
                error += e;
            }
            Err(Error::IntegrationFailure { partial, error: e }) => {
                return Err(Error::IntegrationFailure { partial: value + partial, error: error + e });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ProbEstimate::integrated(value, error))
}
