//! The Fock-basis master equation and the squeezed-thermal ODEs must agree.

use squeezecav_core::fock::{evolve_rho, observables_from_rho, EvolutionStats};
use squeezecav_core::{
    compare_trajectories, integrate, FockDensityMatrix, IntegrationControl, OracleSettings, PumpConfig, StsState,
};

fn report(g: f64, tau_end: f64) -> squeezecav_core::OracleReport {
    let ctrl = IntegrationControl::new(1e-3, tau_end, 50).unwrap();
    let analytic = integrate(StsState::vacuum(), &PumpConfig::resonant(g), &ctrl).unwrap();
    compare_trajectories(&analytic, g, &ctrl, OracleSettings::default()).unwrap()
}

#[test]
fn weak_pump_agreement() {
    let r = report(0.8, 5.0);
    assert!(r.truncation.is_none());
    assert!(r.max_observable_dev() < 1e-4);
    assert!(r.max_dev_g2 < 1e-3);
    assert!(r.max_trace_distance < 1e-5);
    assert!(r.max_purity_dev < 1e-5);
    assert!(r.max_trace_drift < 1e-9);
    assert!(r.max_hermitian_drift < 1e-10);
}

#[test]
fn strong_pump_agreement_with_escalation() {
    let r = report(1.2, 5.0);
    assert!(r.truncation.is_none(), "{r:#?}");
    assert!(r.final_dim > 64 && r.final_dim <= 256, "{}", r.final_dim);
    assert!(r.max_observable_dev() < 1e-4);
    assert!(r.max_trace_distance < 1e-5);
}

#[test]
fn thermal_start_agreement() {
    let ctrl = IntegrationControl::new(1e-3, 2.0, 100).unwrap();
    let init = StsState::new(0.3, 0.0, 0.5).unwrap();
    let analytic = integrate(init, &PumpConfig::resonant(0.6), &ctrl).unwrap();
    let r = compare_trajectories(&analytic, 0.6, &ctrl, OracleSettings::default()).unwrap();
    assert!(r.max_observable_dev() < 1e-4, "{r:#?}");
    assert!(r.max_trace_distance < 1e-5, "{r:#?}");
}

#[test]
fn strong_pump_eventually_exhausts_basis() {
    let ctrl = IntegrationControl::new(1e-3, 40.0, 1000).unwrap();
    let mut stats = EvolutionStats::default();
    let rho0 = FockDensityMatrix::vacuum(32).unwrap();
    let err =
        squeezecav_core::fock::evolve_rho_with(&rho0, 1.2, &ctrl, 128, Some(&mut stats), |_, _| Ok(())).unwrap_err();
    assert!(matches!(err, squeezecav_core::Error::Truncation { .. }), "{err}");
    assert_eq!(stats.final_dim, 128);
}

#[test]
fn oracle_squeezes_x_not_y() {
    let ctrl = IntegrationControl::new(1e-3, 1.0, 1000).unwrap();
    let fock = evolve_rho(&FockDensityMatrix::vacuum(32).unwrap(), 1.0, &ctrl, 64).unwrap();
    let o = observables_from_rho(fock.states.last().unwrap());
    assert!(o.dx < 1.0 && o.dy > 1.0);
}
