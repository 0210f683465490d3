//! Equations of motion for the squeezed thermal state parameters.
//!
//! With `τ = Γt` and a drive `D(τ) = γα(τ)/(ħΓ)`, the state `(u, φ, n_th)`
//! evolves as
//!
//! ```text
//! du/dτ    = i(D e^{−iφ} − D* e^{iφ}) − cs/(2n_th + 1)
//! dφ/dτ    = −2ω/Γ + (c² + s²)/(cs) · (D e^{−iφ} + D* e^{iφ})
//! dn_th/dτ = s² − n_th
//! ```
//!
//! where `s = sinh u`, `c = cosh u`. On resonance the drive is locked to the
//! phase, `D e^{−iφ} = −i g/4`, and the system reduces to two equations in
//! `(u, n_th)` with `φ` constant in the interaction picture.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ObservableSet, StsState, Trajectory};

/// Below this `|sinh u|` the phase equation is treated as singular.
pub const SINGULAR_SINH_EPS: f64 = 1e-10;

/// Integration stops once the amplitude exceeds this (e^{2u} nears f64 range).
pub const MAX_AMPLITUDE: f64 = 300.0;

/// Scaled tolerance for the optional step-halving verification.
pub const STEP_HALVING_TOL: f64 = 1e-8;

const RESONANCE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationControl {
    pub dtau: f64,
    pub tau_end: f64,
    pub sample_every: usize,
    /// Re-run at `dtau/2` and fail if any sampled observable moves by more
    /// than [`STEP_HALVING_TOL`] (relative to `max(1, |value|)`).
    pub richardson_check: bool,
}

impl Default for IntegrationControl {
    fn default() -> Self {
        Self {
            dtau: 1e-3,
            tau_end: 10.0,
            sample_every: 1,
            richardson_check: false,
        }
    }
}

impl IntegrationControl {
    pub fn new(dtau: f64, tau_end: f64, sample_every: usize) -> Result<Self> {
        let ctrl = Self {
            dtau,
            tau_end,
            sample_every,
            richardson_check: false,
        };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dtau > 0.0 && self.dtau.is_finite()) {
            return Err(Error::InvalidControl(format!(
                "dtau must be positive, got {}",
                self.dtau
            )));
        }
        if !(self.tau_end >= 0.0 && self.tau_end.is_finite()) {
            return Err(Error::InvalidControl(format!(
                "tau_end must be nonnegative, got {}",
                self.tau_end
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidControl("sample_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of RK4 steps; the last one is shortened to land on `tau_end`.
    pub fn n_steps(&self) -> usize {
        let ratio = self.tau_end / self.dtau;
        let n = ratio.round();
        if (ratio - n).abs() < 1e-9 {
            n as usize
        } else {
            ratio.ceil() as usize
        }
    }

    /// Time after `k` steps.
    pub fn tau_at(&self, k: usize) -> f64 {
        if k >= self.n_steps() {
            self.tau_end
        } else {
            k as f64 * self.dtau
        }
    }

    /// Whether step `k` is written to the output grid.
    pub fn is_sample(&self, k: usize) -> bool {
        k.is_multiple_of(self.sample_every) || k == self.n_steps()
    }

    /// Same output grid at half the step.
    pub fn halved(&self) -> Self {
        Self {
            dtau: self.dtau / 2.0,
            sample_every: self.sample_every * 2,
            richardson_check: false,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StsDerivative {
    pub du_dtau: f64,
    pub dphi_dtau: f64,
    pub dnth_dtau: f64,
}

/// Complex drive envelope `γα(τ)/(ħΓ)` together with the cavity frequency
/// in units of the loss rate.
#[derive(Clone)]
pub struct Drive {
    pub envelope: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    pub omega_over_gamma: f64,
}

impl Drive {
    pub fn new(envelope: impl Fn(f64) -> Complex64 + Send + Sync + 'static, omega_over_gamma: f64) -> Self {
        Self {
            envelope: Arc::new(envelope),
            omega_over_gamma,
        }
    }

    /// On-resonance pump `−i(g/4)·e^{−i(2(ω/Γ)τ − φ₀)}`, which keeps the
    /// phase equation finite for all τ.
    pub fn resonant(g: f64, phi0: f64, omega_over_gamma: f64) -> Self {
        Self::new(
            move |tau| Complex64::new(0.0, -g / 4.0) * Complex64::from_polar(1.0, phi0 - 2.0 * omega_over_gamma * tau),
            omega_over_gamma,
        )
    }

    pub fn at(&self, tau: f64) -> Complex64 {
        (self.envelope)(tau)
    }
}

impl fmt::Debug for Drive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Drive")
            .field("D(0)", &self.at(0.0))
            .field("omega_over_gamma", &self.omega_over_gamma)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct PumpConfig {
    /// Pump-to-loss ratio, `g ≥ 0`.
    pub g: f64,
    /// Squeezing phase carried on the resonant path.
    pub phi0: f64,
    /// General drive; when set, the full three-equation system is integrated.
    pub drive: Option<Drive>,
}

impl PumpConfig {
    pub fn resonant(g: f64) -> Self {
        Self {
            g,
            phi0: 0.0,
            drive: None,
        }
    }

    pub fn with_drive(g: f64, phi0: f64, drive: Drive) -> Self {
        Self {
            g,
            phi0,
            drive: Some(drive),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::Domain {
                op: "PumpConfig",
                msg: format!("g must be finite and nonnegative, got {}", self.g),
            });
        }
        if !self.phi0.is_finite() {
            return Err(Error::Domain {
                op: "PumpConfig",
                msg: "phi0 must be finite".into(),
            });
        }
        Ok(())
    }
}

/// Reduced on-resonance right-hand side `(du/dτ, dn_th/dτ)`.
pub fn rhs_resonant(u: f64, n_th: f64, g: f64) -> (f64, f64) {
    let (s, c) = (u.sinh(), u.cosh());
    (0.5 * g - c * s / (2.0 * n_th + 1.0), s * s - n_th)
}

/// True when `Re(D e^{−iφ})` vanishes, i.e. the phase equation stays finite
/// at `sinh u = 0`.
pub fn check_resonance_condition(drive_value: Complex64, phi: f64) -> bool {
    let mag = drive_value.norm();
    if mag == 0.0 {
        return true;
    }
    let z = drive_value * Complex64::from_polar(1.0, -phi);
    z.re.abs() <= RESONANCE_REL_TOL * mag
}

/// Full right-hand side for an arbitrary drive value.
pub fn rhs_general(state: &StsState, drive: Complex64, omega_over_gamma: f64) -> Result<StsDerivative> {
    rhs_general_at(state, drive, omega_over_gamma, f64::NAN)
}

fn rhs_general_at(state: &StsState, drive: Complex64, omega_over_gamma: f64, tau: f64) -> Result<StsDerivative> {
    let (s, c) = (state.u.sinh(), state.u.cosh());
    let z = drive * Complex64::from_polar(1.0, -state.phi);
    // i(z − z*) = −2 Im z and z + z* = 2 Re z
    let du_dtau = -2.0 * z.im - c * s / (2.0 * state.n_th + 1.0);
    let phase_drive = if s.abs() > SINGULAR_SINH_EPS {
        (c * c + s * s) / (c * s) * 2.0 * z.re
    } else if check_resonance_condition(drive, state.phi) {
        0.0
    } else {
        return Err(Error::SingularPhase { tau });
    };
    Ok(StsDerivative {
        du_dtau,
        dphi_dtau: -2.0 * omega_over_gamma + phase_drive,
        dnth_dtau: s * s - state.n_th,
    })
}

/// Fixed-step RK4 integrator over `(u, φ, n_th)`.
#[derive(Debug, Clone)]
pub struct StsStepper<'a> {
    pump: &'a PumpConfig,
    tau: f64,
    state: StsState,
}

impl<'a> StsStepper<'a> {
    pub fn new(initial: StsState, pump: &'a PumpConfig, tau0: f64) -> Result<Self> {
        initial.validate()?;
        pump.validate()?;
        Ok(Self {
            pump,
            tau: tau0,
            state: initial,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn state(&self) -> StsState {
        self.state
    }

    fn deriv(&self, tau: f64, y: [f64; 3]) -> Result<[f64; 3]> {
        match &self.pump.drive {
            None => {
                let (du, dn) = rhs_resonant(y[0], y[2], self.pump.g);
                Ok([du, 0.0, dn])
            }
            Some(drive) => {
                let st = StsState {
                    u: y[0],
                    phi: y[1],
                    n_th: y[2],
                };
                let d = rhs_general_at(&st, drive.at(tau), drive.omega_over_gamma, tau)?;
                Ok([d.du_dtau, d.dphi_dtau, d.dnth_dtau])
            }
        }
    }

    /// Advances by `h` and lands exactly on `tau_next`.
    pub fn step(&mut self, h: f64, tau_next: f64) -> Result<StsState> {
        let t = self.tau;
        let y = [self.state.u, self.state.phi, self.state.n_th];
        let add = |a: [f64; 3], k: [f64; 3], f: f64| [a[0] + f * k[0], a[1] + f * k[1], a[2] + f * k[2]];
        let k1 = self.deriv(t, y)?;
        let k2 = self.deriv(t + 0.5 * h, add(y, k1, 0.5 * h))?;
        let k3 = self.deriv(t + 0.5 * h, add(y, k2, 0.5 * h))?;
        let k4 = self.deriv(t + h, add(y, k3, h))?;
        let mut next = [0.0; 3];
        for i in 0..3 {
            next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let state = StsState {
            u: next[0],
            phi: next[1],
            n_th: next[2],
        };
        if !(state.u.is_finite() && state.phi.is_finite() && state.n_th.is_finite()) || state.u.abs() > MAX_AMPLITUDE {
            return Err(Error::IntegrationOverflow {
                tau: tau_next,
                u: state.u,
                n_th: state.n_th,
            });
        }
        self.state = state;
        self.tau = tau_next;
        Ok(state)
    }

    /// Advances to `tau_target` in equal steps no longer than `max_h`.
    pub fn advance_to(&mut self, tau_target: f64, max_h: f64) -> Result<StsState> {
        let span = tau_target - self.tau;
        if span <= 0.0 {
            return Ok(self.state);
        }
        let n = (span / max_h).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let t0 = self.tau;
        for k in 1..=n {
            let t = if k == n { tau_target } else { t0 + k as f64 * h };
            self.step(h, t)?;
        }
        Ok(self.state)
    }
}

/// Integrates from `initial` over `[0, ctrl.tau_end]`.
///
/// The resonant path (no drive) holds `φ = φ₀`; with a drive the phase
/// equation is integrated too.
pub fn integrate(initial: StsState, pump: &PumpConfig, ctrl: &IntegrationControl) -> Result<Trajectory> {
    ctrl.validate()?;
    let mut init = initial;
    if pump.drive.is_none() {
        init.phi = pump.phi0;
    }
    let traj = integrate_raw(init, pump, ctrl)?;
    if ctrl.richardson_check {
        let fine = integrate_raw(init, pump, &ctrl.halved())?;
        let deviation = max_scaled_deviation(&traj, &fine);
        if !(deviation <= STEP_HALVING_TOL) {
            return Err(Error::StepHalving {
                deviation,
                tolerance: STEP_HALVING_TOL,
            });
        }
    }
    Ok(traj)
}

fn integrate_raw(initial: StsState, pump: &PumpConfig, ctrl: &IntegrationControl) -> Result<Trajectory> {
    let mut stepper = StsStepper::new(initial, pump, 0.0)?;
    let n = ctrl.n_steps();
    let mut traj = Trajectory::default();
    traj.push(0.0, initial);
    for k in 1..=n {
        let tau = ctrl.tau_at(k);
        let h = tau - stepper.tau();
        let state = stepper.step(h, tau)?;
        if ctrl.is_sample(k) {
            traj.push(tau, state);
        }
    }
    Ok(traj)
}

/// Largest deviation between matching samples of two trajectories, each
/// difference scaled by `max(1, |value|)`. Returns infinity on grid mismatch.
pub fn max_scaled_deviation(a: &Trajectory, b: &Trajectory) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let scaled = |x: f64, y: f64| (x - y).abs() / x.abs().max(1.0);
    let mut worst = 0.0f64;
    for i in 0..a.len() {
        if (a.tau_grid[i] - b.tau_grid[i]).abs() > 1e-9 {
            return f64::INFINITY;
        }
        worst = worst.max(observable_deviation(&a.observables[i], &b.observables[i], scaled));
    }
    worst
}

pub(crate) fn observable_deviation(a: &ObservableSet, b: &ObservableSet, metric: impl Fn(f64, f64) -> f64) -> f64 {
    let mut d = metric(a.dx, b.dx)
        .max(metric(a.dy, b.dy))
        .max(metric(a.product, b.product))
        .max(metric(a.n_mean, b.n_mean));
    if let (Some(x), Some(y)) = (a.g2, b.g2) {
        d = d.max(metric(x, y));
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mean_photon;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn resonant_rhs_examples() {
        assert_eq!(rhs_resonant(0.0, 0.0, 0.8), (0.4, 0.0));
        assert_eq!(rhs_resonant(0.0, 1.0, 0.0), (0.0, -1.0));
        let (du, dn) = rhs_resonant(0.5 * 0.8f64.atanh(), 1.0 / 3.0, 0.8);
        assert!(du.abs() < 1e-12 && dn.abs() < 1e-12, "{du} {dn}");
    }

    #[test]
    fn resonance_condition_examples() {
        assert!(check_resonance_condition(Complex64::new(0.0, -0.2), 0.0));
        assert!(!check_resonance_condition(Complex64::new(0.2, 0.0), 0.0));
        assert!(check_resonance_condition(Complex64::new(0.0, 0.0), 1.3));
        for &phi in &[0.0, 0.3, FRAC_PI_2, 2.0, -2.7] {
            for &eta in &[0.1, -0.7, 3.0] {
                let d = Complex64::new(0.0, -eta) * Complex64::from_polar(1.0, phi);
                assert!(check_resonance_condition(d, phi));
            }
        }
    }

    #[test]
    fn general_rhs_reduces_on_resonance() {
        let g = 0.8;
        let phi = 0.9;
        let st = StsState::new(0.7, phi, 0.4).unwrap();
        let drive = Complex64::new(0.0, -g / 4.0) * Complex64::from_polar(1.0, phi);
        let d = rhs_general(&st, drive, 2.5).unwrap();
        let (du, dn) = rhs_resonant(0.7, 0.4, g);
        assert!((d.du_dtau - du).abs() < 1e-14);
        assert!((d.dnth_dtau - dn).abs() < 1e-14);
        assert!((d.dphi_dtau + 5.0).abs() < 1e-14);
    }

    #[test]
    fn pump_off_leaves_only_decay() {
        let st = StsState::new(0.6, 0.2, 0.3).unwrap();
        let d = rhs_general(&st, Complex64::new(0.0, 0.0), 1.0).unwrap();
        let (s, c) = (0.6f64.sinh(), 0.6f64.cosh());
        assert!((d.du_dtau + c * s / 1.6).abs() < 1e-15);
        assert_eq!(d.dphi_dtau, -2.0);
    }

    #[test]
    fn singular_phase_detected() {
        let st = StsState::vacuum();
        assert!(matches!(
            rhs_general(&st, Complex64::new(0.2, 0.0), 0.0),
            Err(Error::SingularPhase { .. })
        ));
        assert!(rhs_general(&st, Complex64::new(0.0, -0.2), 0.0).is_ok());
    }

    #[test]
    fn unpumped_vacuum_stays_put() {
        let ctrl = IntegrationControl::new(1e-3, 5.0, 100).unwrap();
        let traj = integrate(StsState::vacuum(), &PumpConfig::resonant(0.0), &ctrl).unwrap();
        assert_eq!(traj.len(), 51);
        assert!(traj.states.iter().all(|s| *s == StsState::vacuum()));
        assert_eq!(traj.observables[0].g2, None);
    }

    #[test]
    fn grid_lands_on_tau_end() {
        let ctrl = IntegrationControl::new(0.3, 1.0, 2).unwrap();
        assert_eq!(ctrl.n_steps(), 4);
        let traj = integrate(StsState::vacuum(), &PumpConfig::resonant(0.5), &ctrl).unwrap();
        assert_eq!(traj.tau_grid.len(), 3);
        assert_eq!(*traj.tau_grid.last().unwrap(), 1.0);
        assert!(traj.tau_grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn tau_end_zero_gives_single_sample() {
        let ctrl = IntegrationControl::new(1e-3, 0.0, 1).unwrap();
        let traj = integrate(StsState::vacuum(), &PumpConfig::resonant(0.5), &ctrl).unwrap();
        assert_eq!(traj.tau_grid, vec![0.0]);
    }

    #[test]
    fn weak_pump_reaches_fixed_point() {
        let u_ss = 0.5 * 0.8f64.atanh();
        let ctrl = IntegrationControl::new(1e-3, 120.0, 1000).unwrap();
        let traj = integrate(StsState::vacuum(), &PumpConfig::resonant(0.8), &ctrl).unwrap();
        let (_, s, _) = traj.last().unwrap();
        assert!((s.u - u_ss).abs() < 1e-9);
        assert!((s.n_th - 1.0 / 3.0).abs() < 1e-9);
        let (du, dn) = rhs_resonant(s.u, s.n_th, 0.8);
        assert!(du.abs() < 1e-9 && dn.abs() < 1e-9);
    }

    #[test]
    fn weak_pump_approach_is_limited_by_slow_mode() {
        // The stretched quadrature relaxes at rate 1 − g:
        // ΔY² = (1 − g e^{(g−1)τ}) / (1 − g).
        let g: f64 = 0.8;
        let ctrl = IntegrationControl::new(1e-3, 50.0, 1000).unwrap();
        let traj = integrate(StsState::vacuum(), &PumpConfig::resonant(g), &ctrl).unwrap();
        let (tau, _, o) = traj.last().unwrap();
        let closed = (1.0 - g * ((g - 1.0) * tau).exp()) / (1.0 - g);
        assert!((o.dy.powi(2) - closed).abs() < 1e-9);
        assert!((o.dy.powi(2) - 1.0 / (1.0 - g)).abs() > 1e-4);
    }

    #[test]
    fn strong_pump_early_photons_are_svs_like() {
        let ctrl = IntegrationControl::new(1e-3, 10.0, 10).unwrap();
        let traj = integrate(StsState::vacuum(), &PumpConfig::resonant(1.2), &ctrl).unwrap();
        for (tau, (s, o)) in traj.tau_grid.iter().zip(traj.states.iter().zip(&traj.observables)) {
            if *tau > 0.0 && *tau < 1.0 {
                let rel = (o.n_mean - s.u.sinh().powi(2)) / o.n_mean;
                let bound = if *tau <= 0.3 { 0.1 } else { 0.3 };
                assert!(rel >= 0.0 && rel < bound, "tau {tau}: {rel}");
            }
        }
        let n: Vec<f64> = traj.observables.iter().map(|o| o.n_mean).collect();
        assert!(n.windows(2).all(|w| w[1] > w[0]));
        // Long-time growth at rate g − 1.
        assert!(n.last().unwrap() > &(2.0 * n[n.len() / 2]));
    }

    #[test]
    fn quadratures_follow_linear_moment_equations() {
        // Second moments obey dΔX²/dτ = 1 − (1+g)ΔX², dΔY²/dτ = 1 + (g−1)ΔY².
        for &g in &[0.4, 1.0, 1.2, 5.0] {
            let ctrl = IntegrationControl::new(1e-3, 2.0, 100).unwrap();
            let traj = integrate(StsState::vacuum(), &PumpConfig::resonant(g), &ctrl).unwrap();
            for (tau, o) in traj.tau_grid.iter().zip(&traj.observables) {
                let vx = (1.0 + g * (-(1.0 + g) * tau).exp()) / (1.0 + g);
                let vy = if g == 1.0 {
                    1.0 + tau
                } else {
                    (g * ((g - 1.0) * tau).exp() - 1.0) / (g - 1.0)
                };
                assert!((o.dx.powi(2) - vx).abs() < 1e-10 * vx.max(1.0), "g {g} tau {tau}");
                assert!((o.dy.powi(2) - vy).abs() < 1e-10 * vy.max(1.0), "g {g} tau {tau}");
            }
        }
    }

    #[test]
    fn general_drive_matches_resonant_path() {
        let g = 1.1;
        let phi0 = 0.4;
        let omega = 3.0;
        let ctrl = IntegrationControl::new(1e-3, 3.0, 50).unwrap();
        let res = integrate(StsState::vacuum(), &PumpConfig::resonant(g), &ctrl).unwrap();
        let init = StsState::new(0.0, phi0, 0.0).unwrap();
        let pump = PumpConfig::with_drive(g, phi0, Drive::resonant(g, phi0, omega));
        let gen = integrate(init, &pump, &ctrl).unwrap();
        for i in 0..res.len() {
            let (a, b) = (&res.states[i], &gen.states[i]);
            assert!((a.u - b.u).abs() < 1e-10, "u at {}", res.tau_grid[i]);
            assert!((a.n_th - b.n_th).abs() < 1e-10);
            assert!((b.phi - (phi0 - 2.0 * omega * gen.tau_grid[i])).abs() < 1e-8);
        }
    }

    #[test]
    fn misaligned_drive_fails_at_start() {
        let pump = PumpConfig::with_drive(0.5, 0.0, Drive::new(|_| Complex64::new(0.3, 0.0), 0.0));
        let ctrl = IntegrationControl::new(1e-3, 1.0, 1).unwrap();
        assert!(matches!(
            integrate(StsState::vacuum(), &pump, &ctrl),
            Err(Error::SingularPhase { .. })
        ));
    }

    #[test]
    fn overflow_reported_with_tau() {
        let ctrl = IntegrationControl::new(1e-3, 50.0, 100).unwrap();
        match integrate(StsState::vacuum(), &PumpConfig::resonant(100.0), &ctrl) {
            Err(Error::IntegrationOverflow { tau, .. }) => assert!(tau > 0.0 && tau < 50.0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn richardson_check_passes_for_moderate_pump() {
        let ctrl = IntegrationControl {
            richardson_check: true,
            ..IntegrationControl::new(1e-3, 5.0, 10).unwrap()
        };
        assert!(integrate(StsState::vacuum(), &PumpConfig::resonant(1.2), &ctrl).is_ok());
        let coarse = IntegrationControl {
            richardson_check: true,
            ..IntegrationControl::new(0.5, 5.0, 1).unwrap()
        };
        assert!(matches!(
            integrate(StsState::vacuum(), &PumpConfig::resonant(1.2), &coarse),
            Err(Error::StepHalving { .. })
        ));
    }

    #[test]
    fn thermal_initial_state_decays() {
        let ctrl = IntegrationControl::new(1e-3, 3.0, 1000).unwrap();
        let traj = integrate(StsState::new(0.0, 0.0, 1.0).unwrap(), &PumpConfig::resonant(0.0), &ctrl).unwrap();
        let (_, s, _) = traj.last().unwrap();
        assert!((s.n_th - (-3.0f64).exp()).abs() < 1e-10);
        assert!((mean_photon(s) - s.n_th).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_control() {
        assert!(IntegrationControl::new(0.0, 1.0, 1).is_err());
        assert!(IntegrationControl::new(1e-3, -1.0, 1).is_err());
        assert!(IntegrationControl::new(1e-3, 1.0, 0).is_err());
        let ctrl = IntegrationControl::default();
        assert!(integrate(StsState::vacuum(), &PumpConfig::resonant(-1.0), &ctrl).is_err());
    }

    proptest! {
        #[test]
        fn reduction_consistency(u in 0.1f64..3.0, n_th in 0.0f64..10.0, g in 0.0f64..5.0, phi in -3.0f64..3.0) {
            let st = StsState::new(u, phi, n_th).unwrap();
            let drive = Complex64::new(0.0, -g / 4.0) * Complex64::from_polar(1.0, phi);
            let d = rhs_general(&st, drive, 0.0).unwrap();
            let (du, dn) = rhs_resonant(u, n_th, g);
            prop_assert!((d.du_dtau - du).abs() < 1e-14);
            prop_assert!((d.dnth_dtau - dn).abs() < 1e-14);
            prop_assert!(d.dphi_dtau.abs() < 1e-14);
        }
    }
}
