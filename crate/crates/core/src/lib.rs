//! Hybrid NOMA uplink analysis.
//!
//! An opportunistic user `U_n` transmits in its own OMA slot and, via NOMA,
//! in the slot of a legacy user `U_m`. This crate models three decoding
//! strategies for the NOMA slot (fixed SIC, hybrid SIC without power
//! adaptation, hybrid SIC with power adaptation) and evaluates the
//! probability that the hybrid scheme fails to beat pure OMA:
//!
//! * by Monte Carlo over ordered Rayleigh channel gains ([`prob::mc`]),
//! * by adaptive 2-D integration of the failure region ([`prob::region`]),
//! * in closed form for the power-adaptation component `P_T`
//!   ([`analytic::exact`]) and its high-SNR limit ([`analytic::asymptotic`]).
//!
//! Channel indices (`m`, `n`) are 1-based throughout the public API.

// Negated comparisons (`!(x > 0.0)`) are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes and reference values are kept at full printed precision.
#![allow(clippy::excessive_precision)]

pub mod analytic;
pub mod channel;
pub mod error;
pub mod numerics;
pub mod prob;
pub mod schemes;

pub use error::{Error, Result};
pub use schemes::{Branch, RateDecision, Scheme, SystemConfig};
