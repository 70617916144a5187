//! Closed-form and high-SNR evaluation of the power-adaptation failure
//! probability `P_T`.

pub mod asymptotic;
pub mod constants;
pub mod exact;

pub use asymptotic::{
    asymptotic_breakdown, gamma5_series, p_t_asymptotic, AsymptoticBreakdown, AsymptoticConstants, SeriesValue,
};
pub use constants::{compute_constants, RegimeConstants};
pub use exact::{
    gamma1, gaussian_strip, p_t_breakdown, p_t_exact, strips, Edge, ExactBreakdown, ExactOptions, Strip, StripValue,
    MAX_RELATIVE_FLOOR,
};
