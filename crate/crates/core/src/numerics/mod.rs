//! Numeric kernels shared by the simulation and analysis code.

pub mod dd;
pub mod quadrature;
pub mod real;
pub mod rng;
pub mod special;
pub mod sum;

pub use dd::DoubleDouble;
pub use quadrature::{adaptive, gauss_chebyshev, gauss_legendre, AdaptiveOptions, ChebyshevRule, NodeMode, QuadResult};
pub use real::Real;
pub use rng::Stream;
pub use special::{binomial, erf, erfc, erfcx, factorial};
pub use sum::NeumaierSum;
