//! Datasets behind each figure.
//!
//! Time spans default to 20 for the weak and critical pump figures and 4
//! for the strong pump curves; `tau_end` in the config replaces both.

use squeezecav_core::steady::g_for_steady_photons;
use squeezecav_core::{find_threshold, g2_ss, quad_limits, steady_state, svs_g2, StsState, Trajectory};

use crate::config::RunConfig;
use crate::dataset::{g_label, param_label, FigureDataset};
use crate::error::RunError;
use crate::runner::{nan_if_none, trajectory, Check, Piece};

pub const REGIME_G: [f64; 3] = [0.8, 1.0, 1.2];
pub const SUBCRITICAL_G: [f64; 3] = [0.4, 0.6, 0.8];
pub const STRONG_G: [f64; 4] = [5.0, 10.0, 50.0, 100.0];
pub const THRESHOLD_DELTAS: [f64; 2] = [0.1, 0.2];

pub const WEAK_TAU_END: f64 = 20.0;
pub const STRONG_TAU_END: f64 = 4.0;
pub const THRESHOLD_TAU_END: f64 = 20.0;

/// Points on the open interval (0, 1) for the steady-state curves.
pub const STEADY_GRID_POINTS: usize = 199;
/// Log-spaced photon numbers for the STS vs SVS comparison.
pub const INSET_N_RANGE: (f64, f64) = (1e-3, 1e2);
pub const INSET_POINTS: usize = 101;
/// Log-spaced pump ratios from 1 to 100 for the threshold curves.
pub const THRESHOLD_GRID_POINTS: usize = 41;

/// Largest |ΔX(τ_end) − 1/√(1+g)| accepted for the sub-critical curves.
pub const ASYMPTOTE_TOL: f64 = 1e-6;

type Builder = fn(&RunConfig) -> Result<Piece, RunError>;

pub(crate) const FIGURES: [(&str, Builder); 13] = [
    ("fig1a", fig1a),
    ("fig1b", fig1b),
    ("fig2a", |c| regime_noise(c, "fig2a", REGIME_G[0])),
    ("fig2b", |c| regime_noise(c, "fig2b", REGIME_G[1])),
    ("fig2c", |c| regime_noise(c, "fig2c", REGIME_G[2])),
    ("fig3a", fig3a),
    ("fig3b", fig3b),
    ("fig3c", fig3c),
    ("fig4", fig4),
    ("fig4-inset", fig4_inset),
    ("fig5a", fig5a),
    ("fig5b", fig5b),
    ("fig6", fig6),
];

pub fn figure_ids() -> impl Iterator<Item = &'static str> {
    FIGURES.iter().map(|(id, _)| *id)
}

fn span(cfg: &RunConfig, default: f64) -> f64 {
    cfg.tau_end.unwrap_or(default)
}

fn runs(cfg: &RunConfig, gs: &[f64], tau_end: f64) -> Result<Vec<Trajectory>, RunError> {
    gs.iter()
        .map(|&g| trajectory(cfg, StsState::vacuum(), g, tau_end))
        .collect()
}

/// `tau` plus one column per run, named `<prefix>_g<g>`.
fn per_g(
    id: &str,
    prefix: &str,
    gs: &[f64],
    trajs: &[Trajectory],
    f: impl Fn(&Trajectory, usize) -> f64,
) -> FigureDataset {
    let mut ds = FigureDataset::new(id).with("tau", trajs[0].tau_grid.clone());
    for (g, t) in gs.iter().zip(trajs) {
        ds.push(
            format!("{prefix}_{}", g_label(*g)),
            (0..t.len()).map(|i| f(t, i)).collect(),
        );
    }
    ds
}

fn constant_columns(
    ds: &mut FigureDataset,
    prefix: &str,
    gs: &[f64],
    value: impl Fn(f64) -> Result<f64, RunError>,
) -> Result<(), RunError> {
    let rows = ds.rows();
    for &g in gs {
        ds.push(format!("{prefix}_{}", g_label(g)), vec![value(g)?; rows]);
    }
    Ok(())
}

fn fig1a(cfg: &RunConfig) -> Result<Piece, RunError> {
    let trajs = runs(cfg, &REGIME_G, span(cfg, WEAK_TAU_END))?;
    Ok(per_g("fig1a", "u", &REGIME_G, &trajs, |t, i| t.states[i].u).into())
}

fn fig1b(cfg: &RunConfig) -> Result<Piece, RunError> {
    let trajs = runs(cfg, &REGIME_G, span(cfg, WEAK_TAU_END))?;
    let ds = per_g("fig1b", "n_th", &REGIME_G, &trajs, |t, i| t.states[i].n_th);
    let strong = &trajs[2];
    let rising = strong.states.windows(2).all(|w| w[1].n_th > w[0].n_th);
    let late = strong.states[strong.len() - 1].n_th / strong.states[strong.len() / 2].n_th;
    Ok(Piece {
        datasets: vec![ds],
        checks: vec![Check {
            name: format!("fig1b_n_th_increasing_{}", g_label(REGIME_G[2])),
            passed: rising,
            detail: format!("n_th strictly increasing; growth over second half x{late:.3e}"),
        }],
    })
}

fn regime_noise(cfg: &RunConfig, id: &str, g: f64) -> Result<Piece, RunError> {
    let t = trajectory(cfg, StsState::vacuum(), g, span(cfg, WEAK_TAU_END))?;
    let o = &t.observables;
    Ok(FigureDataset::new(id)
        .with("tau", t.tau_grid.clone())
        .with("dx", o.iter().map(|o| o.dx).collect())
        .with("dy", o.iter().map(|o| o.dy).collect())
        .with("dxdy", o.iter().map(|o| o.product).collect())
        .with("n_mean", o.iter().map(|o| o.n_mean).collect())
        .into())
}

fn solver(ctx: &str) -> impl Fn(squeezecav_core::Error) -> RunError + '_ {
    move |e| RunError::solver(ctx, e)
}

fn fig3a(cfg: &RunConfig) -> Result<Piece, RunError> {
    let tau_end = span(cfg, WEAK_TAU_END);
    let trajs = runs(cfg, &SUBCRITICAL_G, tau_end)?;
    let mut ds = per_g("fig3a", "dx", &SUBCRITICAL_G, &trajs, |t, i| t.observables[i].dx);
    constant_columns(&mut ds, "dx_ss", &SUBCRITICAL_G, |g| {
        Ok(quad_limits(g).map_err(solver("dx limit"))?.dx_ss)
    })?;
    let checks = SUBCRITICAL_G
        .iter()
        .zip(&trajs)
        .map(|(&g, t)| {
            let dev = (t.observables[t.len() - 1].dx - (1.0 + g).sqrt().recip()).abs();
            Check {
                name: format!("fig3a_asymptote_{}", g_label(g)),
                passed: dev < ASYMPTOTE_TOL,
                detail: format!("|dx(tau={tau_end}) - 1/sqrt(1+g)| = {dev:e} < {ASYMPTOTE_TOL:e}"),
            }
        })
        .collect();
    Ok(Piece {
        datasets: vec![ds],
        checks,
    })
}

fn fig3b(cfg: &RunConfig) -> Result<Piece, RunError> {
    let trajs = runs(cfg, &SUBCRITICAL_G, span(cfg, WEAK_TAU_END))?;
    let mut ds = per_g("fig3b", "dy", &SUBCRITICAL_G, &trajs, |t, i| t.observables[i].dy);
    constant_columns(&mut ds, "dy_ss", &SUBCRITICAL_G, |g| {
        Ok(nan_if_none(quad_limits(g).map_err(solver("dy limit"))?.dy_ss))
    })?;
    Ok(ds.into())
}

fn fig3c(cfg: &RunConfig) -> Result<Piece, RunError> {
    let trajs = runs(cfg, &SUBCRITICAL_G, span(cfg, WEAK_TAU_END))?;
    let mut ds = per_g("fig3c", "g2", &SUBCRITICAL_G, &trajs, |t, i| {
        nan_if_none(t.observables[i].g2)
    });
    constant_columns(&mut ds, "g2_ss", &SUBCRITICAL_G, |g| {
        g2_ss(g).map_err(solver("g2 limit"))
    })?;
    Ok(ds.into())
}

fn fig4(_: &RunConfig) -> Result<Piece, RunError> {
    let n = STEADY_GRID_POINTS;
    let gs: Vec<f64> = (1..=n).map(|k| k as f64 / (n + 1) as f64).collect();
    let mut g2 = Vec::with_capacity(n);
    let mut n_mean = Vec::with_capacity(n);
    let mut n_th = Vec::with_capacity(n);
    for &g in &gs {
        let ss = steady_state(g).map_err(solver("steady state"))?;
        g2.push(nan_if_none(ss.g2_ss));
        n_mean.push(ss.n_mean_ss);
        n_th.push(ss.n_th_ss);
    }
    Ok(FigureDataset::new("fig4")
        .with("g", gs)
        .with("g2_ss", g2)
        .with("n_mean_ss", n_mean)
        .with("n_th_ss", n_th)
        .into())
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..points)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (points - 1) as f64))
        .collect()
}

fn fig4_inset(_: &RunConfig) -> Result<Piece, RunError> {
    let ns = log_grid(INSET_N_RANGE.0, INSET_N_RANGE.1, INSET_POINTS);
    let mut sts = Vec::with_capacity(ns.len());
    let mut svs = Vec::with_capacity(ns.len());
    for &n in &ns {
        let g = g_for_steady_photons(n).map_err(solver("pump for photon number"))?;
        sts.push(g2_ss(g).map_err(solver("steady g2"))?);
        svs.push(svs_g2(n).map_err(solver("squeezed vacuum g2"))?);
    }
    Ok(FigureDataset::new("fig4-inset")
        .with("n_mean", ns)
        .with("g2_sts", sts)
        .with("g2_svs", svs)
        .into())
}

fn fig5a(cfg: &RunConfig) -> Result<Piece, RunError> {
    let trajs = runs(cfg, &STRONG_G, span(cfg, STRONG_TAU_END))?;
    let mut ds = per_g("fig5a", "dx", &STRONG_G, &trajs, |t, i| t.observables[i].dx);
    constant_columns(&mut ds, "dx_ss", &STRONG_G, |g| {
        Ok(quad_limits(g).map_err(solver("dx limit"))?.dx_ss)
    })?;
    Ok(ds.into())
}

struct ThresholdSweep {
    gs: Vec<f64>,
    /// Indexed `[delta][g]`.
    tau_star: Vec<Vec<f64>>,
    dx: Vec<Vec<f64>>,
    product: Vec<Vec<f64>>,
    g2: Vec<Vec<f64>>,
}

fn threshold_sweep(cfg: &RunConfig) -> Result<ThresholdSweep, RunError> {
    let gs = log_grid(1.0, 100.0, THRESHOLD_GRID_POINTS);
    let ctrl = cfg
        .control(cfg.tau_end.unwrap_or(THRESHOLD_TAU_END))
        .map_err(solver("threshold control"))?;
    let mut sweep = ThresholdSweep {
        gs: gs.clone(),
        tau_star: Vec::new(),
        dx: Vec::new(),
        product: Vec::new(),
        g2: Vec::new(),
    };
    for &d in &THRESHOLD_DELTAS {
        let mut cols: [Vec<f64>; 4] = Default::default();
        for &g in &gs {
            let t =
                find_threshold(g, d, &ctrl).map_err(|e| RunError::solver(format!("threshold g={g} delta={d}"), e))?;
            let o = &t.observables_at_threshold;
            for (c, v) in cols.iter_mut().zip([t.tau_star, o.dx, o.product, nan_if_none(o.g2)]) {
                c.push(v);
            }
        }
        let [tau_star, dx, product, g2] = cols;
        sweep.tau_star.push(tau_star);
        sweep.dx.push(dx);
        sweep.product.push(product);
        sweep.g2.push(g2);
    }
    Ok(sweep)
}

fn delta_columns(ds: &mut FigureDataset, prefix: &str, values: Vec<Vec<f64>>) {
    for (d, v) in THRESHOLD_DELTAS.iter().zip(values) {
        ds.push(format!("{prefix}_d{}", param_label(*d)), v);
    }
}

fn fig5b(cfg: &RunConfig) -> Result<Piece, RunError> {
    let s = threshold_sweep(cfg)?;
    let mut ds = FigureDataset::new("fig5b").with("g", s.gs);
    delta_columns(&mut ds, "product", s.product);
    delta_columns(&mut ds, "tau_star", s.tau_star);
    delta_columns(&mut ds, "dx", s.dx);
    Ok(ds.into())
}

fn fig6(cfg: &RunConfig) -> Result<Piece, RunError> {
    let s = threshold_sweep(cfg)?;
    let mut ds = FigureDataset::new("fig6").with("g", s.gs);
    delta_columns(&mut ds, "g2", s.g2);
    Ok(ds.into())
}
