//! Scenario execution and output writing.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{json, Value};
use squeezecav_core::{
    compare_trajectories, find_threshold, integrate, quad_limits, steady_state, OracleReport, OracleSettings,
    PumpConfig, StsState, Trajectory,
};

use crate::config::{Mode, RunConfig, MAX_FOCK_DIM};
use crate::dataset::{emit_csv, g_label, FigureDataset};
use crate::error::RunError;
use crate::figures;

/// Oracle tolerances reported in the manifest.
pub const ORACLE_OBSERVABLE_TOL: f64 = 1e-4;
pub const ORACLE_G2_TOL: f64 = 1e-3;
pub const ORACLE_TRACE_DISTANCE_TOL: f64 = 1e-5;

/// Largest change of `u` and `n_th` over the last tenth of a weak-pump run.
pub const SATURATION_TOL: f64 = 1e-6;

pub const EVOLVE_HEADER: [&str; 9] = ["tau", "u", "n_th", "dx", "dy", "dxdy", "n_mean", "n_svs", "g2"];
pub const STEADY_HEADER: [&str; 8] = [
    "g",
    "u_ss",
    "n_th_ss",
    "n_mean_ss",
    "dx_ss",
    "dy_ss",
    "product_ss",
    "g2_ss",
];
pub const THRESHOLD_HEADER: [&str; 6] = ["g", "delta", "tau_star", "dx", "product", "g2"];
pub const ORACLE_HEADER: [&str; 12] = [
    "g",
    "samples_compared",
    "max_dev_dx",
    "max_dev_dy",
    "max_dev_n_mean",
    "max_dev_g2",
    "max_trace_distance",
    "max_purity_dev",
    "max_trace_drift",
    "max_hermitian_drift",
    "final_dim",
    "usable_tau_end",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub scenario: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            passed: value < tol,
            detail: format!("{value:e} < {tol:e}"),
        }
    }
}

/// Everything a run produced, in deterministic order.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub datasets: Vec<FigureDataset>,
    pub checks: Vec<Check>,
    pub failures: Vec<Failure>,
}

impl RunOutcome {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn dataset(&self, id: &str) -> Option<&FigureDataset> {
        self.datasets.iter().find(|d| d.id == id)
    }

    fn absorb(&mut self, scenario: String, result: Result<Piece, RunError>) {
        match result {
            Ok(piece) => {
                self.datasets.extend(piece.datasets);
                self.checks.extend(piece.checks);
            }
            Err(e) => self.failures.push(Failure {
                scenario,
                error: e.to_string(),
            }),
        }
    }
}

#[derive(Default)]
pub(crate) struct Piece {
    pub datasets: Vec<FigureDataset>,
    pub checks: Vec<Check>,
}

impl From<FigureDataset> for Piece {
    fn from(ds: FigureDataset) -> Self {
        Piece {
            datasets: vec![ds],
            checks: Vec::new(),
        }
    }
}

/// Runs every scenario in `cfg`. Solver failures are collected per
/// scenario; the other scenarios still run.
pub fn run_scenario(cfg: &RunConfig) -> RunOutcome {
    let mut outcome = RunOutcome::default();
    match cfg.mode {
        Mode::Evolve => {
            let results: Vec<_> = cfg.g_values.par_iter().map(|&g| (g, evolve_piece(cfg, g))).collect();
            for (g, r) in results {
                outcome.absorb(format!("evolve {}", g_label(g)), r);
            }
        }
        Mode::Steady => outcome.absorb("steady".into(), steady_table(&cfg.g_values).map(Piece::from)),
        Mode::Threshold => {
            let (table, failures) = threshold_table(cfg);
            outcome.failures.extend(failures);
            outcome.absorb("threshold".into(), table.map(Piece::from));
        }
        Mode::OracleCompare => {
            let results: Vec<_> = cfg.g_values.par_iter().map(|&g| (g, oracle_row(cfg, g))).collect();
            let mut rows = Vec::new();
            for (g, r) in results {
                match r {
                    Ok((report, checks)) => {
                        rows.push(report);
                        outcome.checks.extend(checks);
                    }
                    Err(e) => outcome.failures.push(Failure {
                        scenario: format!("oracle-compare {}", g_label(g)),
                        error: e.to_string(),
                    }),
                }
            }
            if !rows.is_empty() {
                outcome.datasets.push(oracle_table(&rows));
            }
        }
        Mode::Figures => {
            let results: Vec<_> = figures::FIGURES
                .par_iter()
                .map(|&(id, build)| (id, build(cfg)))
                .collect();
            for (id, r) in results {
                outcome.absorb(format!("figure {id}"), r);
            }
        }
    }
    outcome
}

/// Writes every dataset plus `manifest.json` into `cfg.output_dir`.
pub fn write_outputs(cfg: &RunConfig, outcome: &RunOutcome) -> Result<Vec<PathBuf>, RunError> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut written = Vec::with_capacity(outcome.datasets.len() + 1);
    for ds in &outcome.datasets {
        written.push(emit_csv(ds, dir)?);
    }
    let manifest_path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest(cfg, outcome)).expect("manifest is plain JSON");
    text.push('\n');
    fs::write(&manifest_path, text).map_err(|source| RunError::Io {
        path: manifest_path.clone(),
        source,
    })?;
    written.push(manifest_path);
    Ok(written)
}

pub fn manifest(cfg: &RunConfig, outcome: &RunOutcome) -> Value {
    let files: Vec<Value> = outcome
        .datasets
        .iter()
        .map(|d| {
            json!({
                "file": format!("{}.csv", d.id),
                "rows": d.rows(),
                "columns": d.columns.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let checks: Vec<Value> = outcome
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
        .collect();
    let failures: Vec<Value> = outcome
        .failures
        .iter()
        .map(|f| json!({"scenario": f.scenario, "error": f.error}))
        .collect();
    json!({
        "status": if outcome.succeeded() { "ok" } else { "failed" },
        "mode": cfg.mode.as_str(),
        "parameters": cfg.to_json(),
        "files": files,
        "checks": checks,
        "failures": failures,
    })
}

/// Runs and writes. Returns the outcome even if some scenarios failed;
/// only output errors are returned as `Err`.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let outcome = run_scenario(cfg);
    write_outputs(cfg, &outcome)?;
    Ok(outcome)
}

pub(crate) fn trajectory(cfg: &RunConfig, initial: StsState, g: f64, tau_end: f64) -> Result<Trajectory, RunError> {
    let ctx = || format!("integrating g={g} to tau={tau_end}");
    let ctrl = cfg.control(tau_end).map_err(|e| RunError::solver(ctx(), e))?;
    integrate(initial, &PumpConfig::resonant(g), &ctrl).map_err(|e| RunError::solver(ctx(), e))
}

pub(crate) fn nan_if_none(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

pub fn trajectory_dataset(id: impl Into<String>, traj: &Trajectory) -> FigureDataset {
    let obs = &traj.observables;
    let states = &traj.states;
    FigureDataset::new(id)
        .with("tau", traj.tau_grid.clone())
        .with("u", states.iter().map(|s| s.u).collect())
        .with("n_th", states.iter().map(|s| s.n_th).collect())
        .with("dx", obs.iter().map(|o| o.dx).collect())
        .with("dy", obs.iter().map(|o| o.dy).collect())
        .with("dxdy", obs.iter().map(|o| o.product).collect())
        .with("n_mean", obs.iter().map(|o| o.n_mean).collect())
        .with("n_svs", states.iter().map(|s| s.u.sinh().powi(2)).collect())
        .with("g2", obs.iter().map(|o| nan_if_none(o.g2)).collect())
}

fn evolve_piece(cfg: &RunConfig, g: f64) -> Result<Piece, RunError> {
    let tau_end = cfg.tau_end.expect("evolve mode always has tau_end");
    let traj = trajectory(cfg, cfg.initial_state, g, tau_end)?;
    let label = g_label(g);
    let mut checks = Vec::new();
    if g < 1.0 {
        checks.push(Check::below(
            format!("saturation_{label}"),
            late_change(&traj),
            SATURATION_TOL,
        ));
    } else if g > 1.0 {
        let rising = traj.states.windows(2).all(|w| w[1].n_th > w[0].n_th);
        checks.push(Check {
            name: format!("n_th_increasing_{label}"),
            passed: rising,
            detail: format!("n_th strictly increasing over {} samples", traj.len()),
        });
    }
    Ok(Piece {
        datasets: vec![trajectory_dataset(format!("evolve_{label}"), &traj)],
        checks,
    })
}

/// Largest |Δu| and |Δn_th| between any sample in the last 10% of the run
/// and the final sample.
pub fn late_change(traj: &Trajectory) -> f64 {
    let Some((tau_end, last, _)) = traj.last() else {
        return f64::NAN;
    };
    let start = 0.9 * tau_end;
    traj.tau_grid
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= start)
        .map(|(_, s)| (s.u - last.u).abs().max((s.n_th - last.n_th).abs()))
        .fold(0.0, f64::max)
}

/// Steady-state table. Above threshold only `dx_ss` is defined; other
/// fields are `nan`.
pub fn steady_table(g_values: &[f64]) -> Result<FigureDataset, RunError> {
    let mut cols: [Vec<f64>; 8] = Default::default();
    for &g in g_values {
        let row = if g < 1.0 {
            let ss = steady_state(g).map_err(|e| RunError::solver(format!("steady state g={g}"), e))?;
            [
                g,
                ss.u_ss,
                ss.n_th_ss,
                ss.n_mean_ss,
                ss.dx_ss,
                ss.dy_ss,
                ss.product_ss,
                nan_if_none(ss.g2_ss),
            ]
        } else {
            let q = quad_limits(g).map_err(|e| RunError::solver(format!("quadrature limits g={g}"), e))?;
            let n = f64::NAN;
            [g, n, n, n, q.dx_ss, n, n, n]
        };
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    Ok(table("steady", &STEADY_HEADER, cols))
}

fn table<const N: usize>(id: &str, header: &[&str; N], cols: [Vec<f64>; N]) -> FigureDataset {
    let mut ds = FigureDataset::new(id);
    for (name, c) in header.iter().zip(cols) {
        ds.push(*name, c);
    }
    ds
}

fn threshold_table(cfg: &RunConfig) -> (Result<FigureDataset, RunError>, Vec<Failure>) {
    let mut pairs: Vec<(f64, f64)> = cfg
        .g_values
        .iter()
        .flat_map(|&g| cfg.delta_values.iter().map(move |&d| (g, d)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs.dedup();
    let tau_end = cfg.tau_end.expect("threshold mode always has tau_end");
    let results: Vec<_> = pairs
        .par_iter()
        .map(|&(g, d)| {
            let ctrl = cfg.control(tau_end)?;
            find_threshold(g, d, &ctrl)
        })
        .collect();
    let mut cols: [Vec<f64>; 6] = Default::default();
    let mut failures = Vec::new();
    for (&(g, d), r) in pairs.iter().zip(results) {
        match r {
            Ok(t) => {
                let o = &t.observables_at_threshold;
                let row = [g, d, t.tau_star, o.dx, o.product, nan_if_none(o.g2)];
                for (c, v) in cols.iter_mut().zip(row) {
                    c.push(v);
                }
            }
            Err(e) => failures.push(Failure {
                scenario: format!("threshold {} delta={d}", g_label(g)),
                error: e.to_string(),
            }),
        }
    }
    let table = if cols[0].is_empty() {
        Err(RunError::Invariant("no threshold row succeeded".into()))
    } else {
        Ok(table("threshold", &THRESHOLD_HEADER, cols))
    };
    (table, failures)
}

fn oracle_row(cfg: &RunConfig, g: f64) -> Result<(OracleReport, Vec<Check>), RunError> {
    let tau_end = cfg.tau_end.expect("oracle-compare mode always has tau_end");
    let traj = trajectory(cfg, cfg.initial_state, g, tau_end)?;
    let ctrl = cfg
        .control(tau_end)
        .map_err(|e| RunError::solver("oracle control", e))?;
    let settings = OracleSettings {
        initial_dim: cfg.fock_dim,
        max_dim: MAX_FOCK_DIM,
    };
    let report = compare_trajectories(&traj, g, &ctrl, settings)
        .map_err(|e| RunError::solver(format!("Fock oracle g={g}"), e))?;
    let label = g_label(g);
    let mut checks = vec![
        Check::below(
            format!("oracle_observables_{label}"),
            report.max_observable_dev(),
            ORACLE_OBSERVABLE_TOL,
        ),
        Check::below(format!("oracle_g2_{label}"), report.max_dev_g2, ORACLE_G2_TOL),
        Check::below(
            format!("oracle_trace_distance_{label}"),
            report.max_trace_distance,
            ORACLE_TRACE_DISTANCE_TOL,
        ),
    ];
    checks.push(Check {
        name: format!("oracle_coverage_{label}"),
        passed: report.truncation.is_none(),
        detail: match &report.truncation {
            None => format!("compared up to tau={} at N={}", report.usable_tau_end, report.final_dim),
            Some(msg) => format!("stopped at tau={}: {msg}", report.usable_tau_end),
        },
    });
    Ok((report, checks))
}

fn oracle_table(rows: &[OracleReport]) -> FigureDataset {
    let col = |f: &dyn Fn(&OracleReport) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let cols = [
        col(&|r| r.g),
        col(&|r| r.samples_compared as f64),
        col(&|r| r.max_dev_dx),
        col(&|r| r.max_dev_dy),
        col(&|r| r.max_dev_n_mean),
        col(&|r| r.max_dev_g2),
        col(&|r| r.max_trace_distance),
        col(&|r| r.max_purity_dev),
        col(&|r| r.max_trace_drift),
        col(&|r| r.max_hermitian_drift),
        col(&|r| r.final_dim as f64),
        col(&|r| r.usable_tau_end),
    ];
    table("oracle_compare", &ORACLE_HEADER, cols)
}
