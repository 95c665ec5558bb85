//! Stability indicators: quadrature Sobolev norms, time reconstructions of
//! nodal trajectories, the discrete maximal-regularity identity, and
//! reference solutions for error measurement.

mod errors;
mod fd_heat;
mod max_reg;
mod norms;
mod trajectory;

pub use errors::{error_norms, singular_corner_field, ErrorNorms};
pub use fd_heat::{fd_reference_heat, FdSlice, FdSolution};
pub use max_reg::{mr_identity_residual, DiscreteOperator, MaxRegCheck};
pub use norms::{norm_h1, norm_h2, norm_l2};
pub use trajectory::{
    parabolic_stability_indicators, reconstruct, sup_norm_by_level, NodalTrajectory, Reconstruction,
    StabilityIndicators, TimeSlice,
};

/// Indicators recorded at one logging event. Entries that do not apply to
/// the run (e.g. `l2h2_bar` for an elliptic problem) are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsReport {
    pub h1_norm: f64,
    pub h2_norm: f64,
    pub l2h2_bar: f64,
    pub l2l2_hat_dt: f64,
    /// `max_n sup_x |U^n|` (elliptic: `sup_x |u|`).
    pub sup_norm: f64,
    /// `sup_norm` divided by the initial datum's sup-norm.
    pub sup_ratio: f64,
    /// Error against the exact or reference solution; for parabolic runs
    /// the discrete `L²(0,T; ·)` norm over the levels `n = 1..N`.
    pub error_l2: f64,
    /// `error_l2` relative to the same norm of the reference.
    pub rel_error_l2: f64,
    pub error_h1: f64,
}

impl DiagnosticsReport {
    pub fn empty() -> Self {
        Self {
            h1_norm: f64::NAN,
            h2_norm: f64::NAN,
            l2h2_bar: f64::NAN,
            l2l2_hat_dt: f64::NAN,
            sup_norm: f64::NAN,
            sup_ratio: f64::NAN,
            error_l2: f64::NAN,
            rel_error_l2: f64::NAN,
            error_h1: f64::NAN,
        }
    }
}
