use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("second-order correlation undefined: mean photon number is zero")]
    UndefinedCorrelation,

    #[error("squeezing phase equation is singular at tau = {tau}: sinh(u) ~ 0 and the drive violates the resonance condition")]
    SingularPhase { tau: f64 },

    #[error("integration overflow at tau = {tau:.6} (u = {u:.6e}, n_th = {n_th:.6e})")]
    IntegrationOverflow { tau: f64, u: f64, n_th: f64 },

    #[error("step-halving check failed: max scaled deviation {deviation:e} exceeds {tolerance:e}")]
    StepHalving { deviation: f64, tolerance: f64 },

    #[error("no steady state for g = {g} (requires 0 <= g < 1)")]
    NoSteadyState { g: f64 },

    #[error("threshold dx = {target} not reached before tau = {tau_end} (last dx = {last_dx})")]
    ThresholdNotReached { target: f64, tau_end: f64, last_dx: f64 },

    #[error("invalid integration control: {0}")]
    InvalidControl(String),

    #[error("Fock dimension {dim} is too small (need at least 2)")]
    Size { dim: usize },

    #[error("Fock truncation inadequate at tau = {tau} (dim = {dim}, <n> = {n_mean:.6e}): {msg}")]
    Truncation {
        tau: f64,
        dim: usize,
        n_mean: f64,
        msg: String,
    },

    #[error("density matrix trace drifted to {trace} at tau = {tau}")]
    TraceDrift { tau: f64, trace: f64 },

    #[error("oracle grid mismatch: analytic tau = {analytic}, oracle tau = {oracle}")]
    GridMismatch { analytic: f64, oracle: f64 },
}
