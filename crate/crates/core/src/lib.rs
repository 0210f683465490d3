//! Squeezed light from degenerate parametric down-conversion in a lossy
//! single-mode cavity.
//!
//! The cavity state stays a squeezed thermal state for all time, so its
//! dynamics reduce to ODEs for the squeezing amplitude, squeezing phase and
//! effective thermal photon number ([`dynamics`]). [`steady`] holds the
//! closed-form long-time limits and the strong-pump threshold search, and
//! [`fock`] integrates the full master equation in a truncated number basis
//! as an independent check.
//!
//! Time is dimensionless throughout, `τ = Γt`, with `Γ` the cavity intensity
//! decay rate; the pump enters only through the real ratio `g`.

// Guards are written `!(x > lo)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod expm;
pub mod fock;
pub mod model;
pub mod steady;

pub use dynamics::{
    check_resonance_condition, integrate, rhs_general, rhs_resonant, Drive, IntegrationControl, PumpConfig,
    StsDerivative,
};
pub use error::{Error, Result};
pub use fock::{
    build_operators, compare_trajectories, evolve_rho, lindblad_rhs, observables_from_rho, sts_density_matrix,
    FockDensityMatrix, LadderOperators, OracleReport, OracleSettings,
};
pub use model::{
    beta_from_nth, g2, mean_photon, nth_from_beta, quadrature_variances, uncertainty_product, ObservableSet, StsState,
    Trajectory,
};
pub use steady::{
    find_threshold, g2_ss, quad_limits, steady_state, svs_g2, QuadLimits, SteadyStateResult, ThresholdResult,
};
