//! Enhanced-dissipation norms, the energy functional, decay-rate fits and
//! rate-scaling regressions.

mod accum;
mod fit;
mod record;

pub use accum::{XakAccumulator, XakTerms, XakWeights};
pub use fit::{
    fit_decay_rate, least_squares_slope, scaling_exponents, RateRow, ScalingExponents,
    DEFAULT_FIT_WINDOW,
};
pub use record::{energy_e, zero_mode_report, DiagRecord, DiagnosticsTracker};
