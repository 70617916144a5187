//! Probability that a hybrid scheme fails to beat OMA: Monte Carlo
//! estimators and direct numeric integration of event regions.

pub mod estimate;
pub mod mc;
pub mod region;

pub use estimate::{Method, ProbEstimate};
pub use mc::{estimate_decomposition, estimate_probability, estimate_schemes, Decomposition, SchemeSummary};
pub use region::{integrate_event, Curve, Curves, EventRegion, IntegrateOptions, Piece};
