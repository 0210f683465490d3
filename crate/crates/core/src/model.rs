//! Squeezed thermal state parameters and their closed-form observables.
//!
//! A squeezed thermal state (STS) is `S(ξ) ρ_T S†(ξ)` with squeeze operator
//! `S(ξ) = exp[½(ξ* b² − ξ b†²)]`, `ξ = u·e^{iφ}`, and `ρ_T` a thermal state
//! with mean occupation `n_th`.
//!
//! # Quadrature normalization
//!
//! Quadratures are `X = b + b†` and `Y = −i(b − b†)` in the frame that
//! removes the free evolution, so `[X, Y] = 2i` and the vacuum has
//! `ΔX = ΔY = 1`. The uncertainty floor is `ΔX·ΔY ≥ 1`. Texts that use
//! `X = (b + b†)/2` get variances smaller by a factor of 4.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest thermal occupation for which an inverse temperature is reported.
pub const MIN_NTH_FOR_BETA: f64 = 1e-12;

/// Mean photon number below which g² is treated as undefined.
pub const G2_MIN_PHOTONS: f64 = 1e-12;

/// Squeezed thermal state parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StsState {
    /// Squeezing amplitude, `u ≥ 0`.
    pub u: f64,
    /// Squeezing phase in radians.
    pub phi: f64,
    /// Effective thermal photon number, `n_th ≥ 0`.
    pub n_th: f64,
}

impl StsState {
    pub fn new(u: f64, phi: f64, n_th: f64) -> Result<Self> {
        let state = Self { u, phi, n_th };
        state.validate()?;
        Ok(state)
    }

    pub const fn vacuum() -> Self {
        Self {
            u: 0.0,
            phi: 0.0,
            n_th: 0.0,
        }
    }

    /// Builds a state from the complex squeezing parameter `ξ = u·e^{iφ}`.
    pub fn from_xi(xi: Complex64, n_th: f64) -> Result<Self> {
        Self::new(xi.norm(), xi.arg(), n_th)
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.u, self.phi)
    }

    pub fn is_vacuum(&self) -> bool {
        self.u == 0.0 && self.n_th == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u.is_finite() && self.phi.is_finite() && self.n_th.is_finite()) {
            return Err(Error::Domain {
                op: "StsState",
                msg: format!("non-finite parameters {self:?}"),
            });
        }
        if self.u < 0.0 || self.n_th < 0.0 {
            return Err(Error::Domain {
                op: "StsState",
                msg: format!(
                    "u and n_th must be nonnegative, got u = {}, n_th = {}",
                    self.u, self.n_th
                ),
            });
        }
        Ok(())
    }
}

impl Default for StsState {
    fn default() -> Self {
        Self::vacuum()
    }
}

/// Quadrature noise, photon number and g² at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSet {
    pub dx: f64,
    pub dy: f64,
    pub product: f64,
    pub n_mean: f64,
    /// Absent when the mean photon number vanishes.
    pub g2: Option<f64>,
}

impl ObservableSet {
    pub fn from_state(state: &StsState) -> Self {
        let (vx, vy) = quadrature_variances(state);
        let (dx, dy) = (vx.sqrt(), vy.sqrt());
        Self {
            dx,
            dy,
            product: dx * dy,
            n_mean: mean_photon(state),
            g2: g2(state).ok(),
        }
    }
}

/// Time-ordered samples on a dimensionless grid `τ = Γt`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub tau_grid: Vec<f64>,
    pub states: Vec<StsState>,
    pub observables: Vec<ObservableSet>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.tau_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_grid.is_empty()
    }

    pub fn push(&mut self, tau: f64, state: StsState) {
        self.tau_grid.push(tau);
        self.states.push(state);
        self.observables.push(ObservableSet::from_state(&state));
    }

    pub fn last(&self) -> Option<(f64, &StsState, &ObservableSet)> {
        let i = self.len().checked_sub(1)?;
        Some((self.tau_grid[i], &self.states[i], &self.observables[i]))
    }
}

/// Bose–Einstein occupation `1/(e^{βħω} − 1)`.
pub fn nth_from_beta(beta_hw: f64) -> Result<f64> {
    if !(beta_hw > 0.0) {
        return Err(Error::Domain {
            op: "nth_from_beta",
            msg: format!("beta*hbar*omega must be positive, got {beta_hw}"),
        });
    }
    Ok(1.0 / beta_hw.exp_m1())
}

/// Inverse of [`nth_from_beta`]: `ln(1 + 1/n_th)`.
pub fn beta_from_nth(n_th: f64) -> Result<f64> {
    if !(n_th > MIN_NTH_FOR_BETA) || !n_th.is_finite() {
        return Err(Error::Domain {
            op: "beta_from_nth",
            msg: format!("thermal photon number must exceed {MIN_NTH_FOR_BETA:e}, got {n_th}"),
        });
    }
    Ok(n_th.recip().ln_1p())
}

/// `(ΔX², ΔY²) = ((2n_th+1)e^{−2u}, (2n_th+1)e^{2u})`.
pub fn quadrature_variances(state: &StsState) -> (f64, f64) {
    let core = 2.0 * state.n_th + 1.0;
    let stretch = (2.0 * state.u).exp();
    (core / stretch, core * stretch)
}

/// `⟨n⟩ = n_th·cosh(2u) + sinh²(u)`.
pub fn mean_photon(state: &StsState) -> f64 {
    let s = state.u.sinh();
    state.n_th * (2.0 * state.u).cosh() + s * s
}

/// Photon number of the squeezed vacuum with the same amplitude, `sinh²(u)`.
pub fn svs_photon(u: f64) -> f64 {
    let s = u.sinh();
    s * s
}

/// `g² = 2 + (n_th+½)² sinh²(2u) / ⟨n⟩²`.
///
/// The ratio is formed before squaring so strongly pumped states (where
/// `sinh²(2u)` alone would overflow) stay finite.
pub fn g2(state: &StsState) -> Result<f64> {
    let n_mean = mean_photon(state);
    if !(n_mean > G2_MIN_PHOTONS) {
        return Err(Error::UndefinedCorrelation);
    }
    let ratio = (state.n_th + 0.5) * (2.0 * state.u).sinh() / n_mean;
    Ok(2.0 + ratio * ratio)
}

/// `ΔX·ΔY = 2n_th + 1`.
pub fn uncertainty_product(state: &StsState) -> f64 {
    2.0 * state.n_th + 1.0
}
