//! Steady-state and threshold analytics.

use crate::dynamics::{IntegrationControl, PumpConfig, StsStepper};
use crate::error::{Error, Result};
use crate::model::{ObservableSet, StsState};

/// Bisection stops once `|ΔX − target|` is below this.
pub const THRESHOLD_ROOT_TOL: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateResult {
    pub u_ss: f64,
    pub n_th_ss: f64,
    pub n_mean_ss: f64,
    pub dx_ss: f64,
    pub dy_ss: f64,
    pub product_ss: f64,
    /// Absent at `g = 0`, where the cavity holds no photons.
    pub g2_ss: Option<f64>,
}

impl SteadyStateResult {
    pub fn state(&self) -> StsState {
        StsState {
            u: self.u_ss,
            phi: 0.0,
            n_th: self.n_th_ss,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadLimits {
    /// `1/√(1+g)`; an attractor of ΔX for any `g`.
    pub dx_ss: f64,
    /// `1/√(1−g)`, only for `g < 1`.
    pub dy_ss: Option<f64>,
    /// `1/√(1−g²)`, only for `g < 1`.
    pub product_ss: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub tau_star: f64,
    pub state_at_threshold: StsState,
    pub observables_at_threshold: ObservableSet,
    pub delta: f64,
    pub target_dx: f64,
}

fn check_weak(g: f64) -> Result<()> {
    if !g.is_finite() || g < 0.0 {
        return Err(Error::Domain {
            op: "steady_state",
            msg: format!("g must be finite and nonnegative, got {g}"),
        });
    }
    if g >= 1.0 {
        return Err(Error::NoSteadyState { g });
    }
    Ok(())
}

/// Steady thermal photon number `(1 − √(1−g²)) / (2√(1−g²))`, written to
/// avoid cancellation at small `g`.
fn n_th_ss(g: f64) -> f64 {
    let root = (1.0 - g * g).sqrt();
    g * g / (2.0 * root * (1.0 + root))
}

/// Closed-form weak-pump steady state.
pub fn steady_state(g: f64) -> Result<SteadyStateResult> {
    check_weak(g)?;
    let u_ss = 0.5 * g.atanh();
    let n_th = n_th_ss(g);
    let limits = quad_limits(g)?;
    Ok(SteadyStateResult {
        u_ss,
        n_th_ss: n_th,
        n_mean_ss: g * g / (2.0 * (1.0 - g * g)),
        dx_ss: limits.dx_ss,
        dy_ss: limits.dy_ss.expect("g < 1"),
        product_ss: limits.product_ss.expect("g < 1"),
        g2_ss: if g > 0.0 { Some(g2_ss(g)?) } else { None },
    })
}

pub fn quad_limits(g: f64) -> Result<QuadLimits> {
    if !g.is_finite() || g < 0.0 {
        return Err(Error::Domain {
            op: "quad_limits",
            msg: format!("g must be finite and nonnegative, got {g}"),
        });
    }
    let weak = g < 1.0;
    Ok(QuadLimits {
        dx_ss: (1.0 + g).sqrt().recip(),
        dy_ss: weak.then(|| (1.0 - g).sqrt().recip()),
        product_ss: weak.then(|| (1.0 - g * g).sqrt().recip()),
    })
}

/// Steady-state g² from the thermal photon number and `g` alone:
/// `2 + 4(n+½)²(n²+n) / ((2n/g)√(n²+n) + n)²`.
pub fn g2_ss(g: f64) -> Result<f64> {
    check_weak(g)?;
    if g <= 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    let n = n_th_ss(g);
    let nn = n * n + n;
    let denom = 2.0 * n / g * nn.sqrt() + n;
    Ok(2.0 + 4.0 * (n + 0.5).powi(2) * nn / (denom * denom))
}

/// g² of a squeezed vacuum with mean photon number `n_mean`: `3 + 1/n_mean`.
pub fn svs_g2(n_mean: f64) -> Result<f64> {
    if !(n_mean > 0.0) {
        return Err(Error::UndefinedCorrelation);
    }
    Ok(3.0 + n_mean.recip())
}

/// Pump ratio whose steady state holds `n_mean` photons (inverse of
/// `g²/(2(1−g²))`).
pub fn g_for_steady_photons(n_mean: f64) -> Result<f64> {
    if !(n_mean >= 0.0 && n_mean.is_finite()) {
        return Err(Error::Domain {
            op: "g_for_steady_photons",
            msg: format!("photon number must be finite and nonnegative, got {n_mean}"),
        });
    }
    Ok((2.0 * n_mean / (1.0 + 2.0 * n_mean)).sqrt())
}

/// First time at which ΔX, starting from vacuum, falls to
/// `(1+δ)/√(1+g)`.
///
/// Steps through the trajectory until the target is bracketed, then bisects
/// with local re-integration from the left bracket.
pub fn find_threshold(g: f64, delta: f64, ctrl: &IntegrationControl) -> Result<ThresholdResult> {
    ctrl.validate()?;
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::Domain {
            op: "find_threshold",
            msg: format!("g must be positive, got {g}"),
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain {
            op: "find_threshold",
            msg: format!("delta must be positive, got {delta}"),
        });
    }
    let target = (1.0 + delta) * quad_limits(g)?.dx_ss;
    let pump = PumpConfig::resonant(g);
    let excess = |s: &StsState| ObservableSet::from_state(s).dx - target;

    let vacuum = StsState::vacuum();
    if excess(&vacuum) <= 0.0 {
        return Ok(ThresholdResult {
            tau_star: 0.0,
            state_at_threshold: vacuum,
            observables_at_threshold: ObservableSet::from_state(&vacuum),
            delta,
            target_dx: target,
        });
    }

    let mut stepper = StsStepper::new(vacuum, &pump, 0.0)?;
    let n = ctrl.n_steps();
    let mut left = (0.0, vacuum);
    let mut right = None;
    for k in 1..=n {
        let tau = ctrl.tau_at(k);
        let h = tau - stepper.tau();
        let s = stepper.step(h, tau)?;
        if excess(&s) <= 0.0 {
            right = Some((tau, s));
            break;
        }
        left = (tau, s);
    }
    let Some(mut right) = right else {
        return Err(Error::ThresholdNotReached {
            target,
            tau_end: ctrl.tau_end,
            last_dx: ObservableSet::from_state(&left.1).dx,
        });
    };

    let (tau_a, state_a) = left;
    let mut lo = tau_a;
    for _ in 0..MAX_BISECTIONS {
        if excess(&right.1).abs() < THRESHOLD_ROOT_TOL {
            break;
        }
        let mid = 0.5 * (lo + right.0);
        if mid <= lo || mid >= right.0 {
            break;
        }
        let mut local = StsStepper::new(state_a, &pump, tau_a)?;
        let s = local.advance_to(mid, ctrl.dtau)?;
        if excess(&s) <= 0.0 {
            right = (mid, s);
        } else {
            lo = mid;
        }
    }

    let (tau_star, state) = right;
    Ok(ThresholdResult {
        tau_star,
        state_at_threshold: state,
        observables_at_threshold: ObservableSet::from_state(&state),
        delta,
        target_dx: target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{g2, mean_photon, quadrature_variances, uncertainty_product};

    #[test]
    fn steady_examples() {
        let z = steady_state(0.0).unwrap();
        assert_eq!((z.u_ss, z.n_th_ss, z.n_mean_ss), (0.0, 0.0, 0.0));
        assert_eq!((z.dx_ss, z.dy_ss, z.product_ss), (1.0, 1.0, 1.0));
        assert_eq!(z.g2_ss, None);

        let s = steady_state(0.8).unwrap();
        assert!((s.n_th_ss - 1.0 / 3.0).abs() < 1e-14);
        assert!((s.n_mean_ss - 8.0 / 9.0).abs() < 1e-14);

        assert_eq!(steady_state(1.0), Err(Error::NoSteadyState { g: 1.0 }));
        assert!(steady_state(1.5).is_err());
        assert!(steady_state(-0.1).is_err());
    }

    #[test]
    fn quad_limit_examples() {
        assert!((quad_limits(1.2).unwrap().dx_ss - 0.674).abs() < 1e-3);
        assert_eq!(quad_limits(1.2).unwrap().dy_ss, None);
        let q = quad_limits(3f64.sqrt() / 2.0).unwrap();
        assert!((q.product_ss.unwrap() - 2.0).abs() < 1e-12);
        assert!((q.dx_ss - 0.732).abs() < 1e-3);
        let q0 = quad_limits(0.0).unwrap();
        assert_eq!((q0.dx_ss, q0.dy_ss, q0.product_ss), (1.0, Some(1.0), Some(1.0)));
    }

    #[test]
    fn g2_ss_examples() {
        assert!((g2_ss(0.9).unwrap() - 3.23).abs() < 0.01);
        assert!((g2_ss(0.9999).unwrap() - 3.0).abs() < 0.01);
        assert_eq!(g2_ss(0.0), Err(Error::UndefinedCorrelation));
        assert!(matches!(g2_ss(1.0), Err(Error::NoSteadyState { .. })));
        // Small-g expansion: 2 + 1/(2 n_mean) up to O(1) corrections.
        let g = 0.01;
        let n_mean = g * g / (2.0 * (1.0 - g * g));
        let approx = 2.0 + 1.0 / (2.0 * n_mean);
        assert!((g2_ss(g).unwrap() - approx).abs() / approx < 1e-3);
    }

    #[test]
    fn svs_g2_examples() {
        assert!((svs_g2(1e9).unwrap() - (3.0 + 1e-9)).abs() < 1e-15);
        assert_eq!(svs_g2(1.0).unwrap(), 4.0);
        assert!(svs_g2(0.0).is_err());
        let n = 1e-3;
        let ratio = svs_g2(n).unwrap() / g2_ss(g_for_steady_photons(n).unwrap()).unwrap();
        assert!((ratio - 2.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn steady_formulas_agree_with_state_formulas() {
        for k in 1..100 {
            let g = k as f64 / 100.0;
            let s = steady_state(g).unwrap();
            let st = s.state();
            assert!((s.u_ss.sinh().powi(2) - s.n_th_ss).abs() < 1e-12);
            assert!(((2.0 * s.u_ss).tanh() - g).abs() < 1e-12);
            let (vx, vy) = quadrature_variances(&st);
            assert!((vx - s.dx_ss.powi(2)).abs() < 1e-12 * vx.max(1.0));
            assert!((vy - s.dy_ss.powi(2)).abs() < 1e-12 * vy.max(1.0));
            assert!((mean_photon(&st) - s.n_mean_ss).abs() < 1e-12 * s.n_mean_ss.max(1.0));
            assert!((uncertainty_product(&st) - s.product_ss).abs() < 1e-12 * s.product_ss);
            let direct = g2(&st).unwrap();
            assert!((direct - s.g2_ss.unwrap()).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn dx_ss_above_loss_limit_and_g2_decreasing() {
        let mut prev = f64::INFINITY;
        for k in 1..=100 {
            let g = k as f64 / 101.0;
            assert!(quad_limits(g).unwrap().dx_ss > 0.5f64.sqrt());
            let v = g2_ss(g).unwrap();
            assert!(v < prev && v > 3.0);
            prev = v;
        }
    }

    #[test]
    fn thermal_fraction_limits() {
        let s = steady_state(1e-3).unwrap();
        assert!((s.n_th_ss / s.n_mean_ss - 0.5).abs() < 1e-3);
        // The fraction is r/(1+r) with r = sqrt(1 − g²).
        for &g in &[0.5, 0.9, 0.9999, 0.99995] {
            let s = steady_state(g).unwrap();
            let r = (1.0 - g * g).sqrt();
            assert!((s.n_th_ss / s.n_mean_ss - r / (1.0 + r)).abs() < 1e-9);
        }
        assert!(steady_state(0.99995).map(|s| s.n_th_ss / s.n_mean_ss).unwrap() < 0.01);
    }

    #[test]
    fn threshold_immediate_when_target_above_vacuum() {
        let t = find_threshold(0.8, 10.0, &IntegrationControl::default()).unwrap();
        assert_eq!(t.tau_star, 0.0);
        assert_eq!(t.state_at_threshold, StsState::vacuum());
    }

    #[test]
    fn threshold_not_reached() {
        let ctrl = IntegrationControl::new(1e-3, 0.1, 1).unwrap();
        assert!(matches!(
            find_threshold(0.5, 0.01, &ctrl),
            Err(Error::ThresholdNotReached { .. })
        ));
    }

    #[test]
    fn threshold_root_tolerance() {
        let ctrl = IntegrationControl::new(1e-3, 10.0, 1).unwrap();
        let t = find_threshold(5.0, 0.2, &ctrl).unwrap();
        assert!((t.observables_at_threshold.dx - t.target_dx).abs() < THRESHOLD_ROOT_TOL);
    }

    #[test]
    fn threshold_time_decreases_with_pump() {
        let ctrl = IntegrationControl::new(1e-3, 10.0, 1).unwrap();
        let taus: Vec<f64> = [5.0, 10.0, 50.0, 100.0]
            .iter()
            .map(|&g| find_threshold(g, 0.2, &ctrl).unwrap().tau_star)
            .collect();
        assert!(taus.windows(2).all(|w| w[1] < w[0]), "{taus:?}");
    }
}
