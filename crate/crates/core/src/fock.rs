//! Brute-force master-equation integration in a truncated number basis.
//!
//! In the interaction picture with a real pump ratio `g`, the dimensionless
//! master equation reads
//!
//! ```text
//! dρ/dτ = (g/4)[b² − b†², ρ] + bρb† − ½ b†bρ − ½ ρb†b
//! ```
//!
//! Its solution from vacuum is a squeezed thermal state; this module evolves
//! `ρ` directly so that claim can be checked against [`crate::dynamics`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::IntegrationControl;
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::model::{ObservableSet, StsState, Trajectory, G2_MIN_PHOTONS};

pub const DEFAULT_MAX_DIM: usize = 512;
/// Allowed population in the top two number states.
pub const TRUNCATION_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
/// Thermal weight left beyond the basis when building a reconstruction.
pub const THERMAL_TAIL_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Dense ladder operators on `|0⟩..|N−1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderOperators {
    pub dim: usize,
    pub lowering: DMatrix<Complex64>,
    pub raising: DMatrix<Complex64>,
    pub number: DMatrix<Complex64>,
    pub lowering_sq: DMatrix<Complex64>,
    pub raising_sq: DMatrix<Complex64>,
}

pub fn build_operators(dim: usize) -> Result<LadderOperators> {
    if dim < 2 {
        return Err(Error::Size { dim });
    }
    let lowering = DMatrix::from_fn(dim, dim, |m, n| {
        if n == m + 1 {
            Complex64::new((n as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let raising = lowering.adjoint();
    Ok(LadderOperators {
        dim,
        number: &raising * &lowering,
        lowering_sq: &lowering * &lowering,
        raising_sq: &raising * &raising,
        lowering,
        raising,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    entries: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() < 2 {
            return Err(Error::Size { dim: entries.nrows() });
        }
        Ok(Self { entries })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::number_state(0, dim)
    }

    pub fn number_state(m: usize, dim: usize) -> Result<Self> {
        if dim < 2 || m >= dim {
            return Err(Error::Size { dim });
        }
        let mut entries = DMatrix::zeros(dim, dim);
        entries[(m, m)] = Complex64::new(1.0, 0.0);
        Ok(Self { entries })
    }

    /// Bose–Einstein populations `n^m/(n+1)^{m+1}`, renormalized on the
    /// truncated basis.
    pub fn thermal(n_th: f64, dim: usize) -> Result<Self> {
        let w = thermal_weights(n_th, dim)?;
        Ok(Self {
            entries: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                dim,
                w.into_iter().map(|x| Complex64::new(x, 0.0)),
            )),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn population(&self, m: usize) -> f64 {
        self.entries[(m, m)].re
    }

    pub fn top_population(&self) -> f64 {
        let n = self.dim();
        self.population(n - 1) + self.population(n - 2)
    }

    pub fn mean_photon(&self) -> f64 {
        (0..self.dim()).map(|m| m as f64 * self.population(m)).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in j..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn hermitize(&mut self) {
        let n = self.dim();
        for j in 0..n {
            for i in j..n {
                let avg = 0.5 * (self.entries[(i, j)] + self.entries[(j, i)].conj());
                self.entries[(i, j)] = avg;
                self.entries[(j, i)] = avg.conj();
            }
        }
    }

    /// `tr ρ²`, assuming `ρ` is Hermitian.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Zero-pads to a larger basis.
    pub fn embed(&self, new_dim: usize) -> Self {
        let n = self.dim();
        assert!(new_dim >= n);
        let mut entries = DMatrix::zeros(new_dim, new_dim);
        entries.view_mut((0, 0), (n, n)).copy_from(&self.entries);
        Self { entries }
    }

    /// `½ ‖ρ − σ‖₁`, embedding the smaller operand if the dimensions differ.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let n = self.dim().max(other.dim());
        let a = if self.dim() < n { self.embed(n) } else { self.clone() };
        let b = if other.dim() < n { other.embed(n) } else { other.clone() };
        let diff = a.entries - b.entries;
        let real = diff.iter().all(|z| z.im == 0.0);
        let abs_sum: f64 = if real {
            diff.map(|z| z.re).symmetric_eigenvalues().iter().map(|l| l.abs()).sum()
        } else {
            let mut h = diff;
            // Enforce exact Hermiticity for the eigensolver.
            for j in 0..n {
                for i in j..n {
                    let avg = 0.5 * (h[(i, j)] + h[(j, i)].conj());
                    h[(i, j)] = avg;
                    h[(j, i)] = avg.conj();
                }
            }
            h.symmetric_eigenvalues().iter().map(|l| l.abs()).sum()
        };
        0.5 * abs_sum
    }
}

fn thermal_weights(n_th: f64, dim: usize) -> Result<Vec<f64>> {
    if dim < 2 {
        return Err(Error::Size { dim });
    }
    if !(n_th >= 0.0 && n_th.is_finite()) {
        return Err(Error::Domain {
            op: "thermal",
            msg: format!("thermal photon number must be finite and nonnegative, got {n_th}"),
        });
    }
    let ratio = n_th / (n_th + 1.0);
    let mut w: Vec<f64> = (0..dim).map(|m| ratio.powi(m as i32) / (n_th + 1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

/// Right-hand side of the master equation, applied band by band in O(N²).
pub fn lindblad_rhs(rho: &FockDensityMatrix, g: f64) -> DMatrix<Complex64> {
    let r = &rho.entries;
    let n = r.nrows();
    let sq: Vec<f64> = (0..n + 2).map(|k| (k as f64).sqrt()).collect();
    let h = 0.25 * g;
    DMatrix::from_fn(n, n, |m, k| {
        let mut acc = -0.5 * (m + k) as f64 * r[(m, k)];
        if m + 1 < n && k + 1 < n {
            acc += sq[m + 1] * sq[k + 1] * r[(m + 1, k + 1)];
        }
        if h != 0.0 {
            let mut sq_terms = ZERO;
            if m + 2 < n {
                sq_terms += sq[m + 1] * sq[m + 2] * r[(m + 2, k)];
            }
            if m >= 2 {
                sq_terms -= sq[m] * sq[m - 1] * r[(m - 2, k)];
            }
            if k >= 2 {
                sq_terms -= sq[k] * sq[k - 1] * r[(m, k - 2)];
            }
            if k + 2 < n {
                sq_terms += sq[k + 1] * sq[k + 2] * r[(m, k + 2)];
            }
            acc += h * sq_terms;
        }
        acc
    })
}

/// The same generator built from dense operator products.
pub fn lindblad_rhs_dense(rho: &FockDensityMatrix, ops: &LadderOperators, g: f64) -> DMatrix<Complex64> {
    let r = &rho.entries;
    let gen = (&ops.lowering_sq - &ops.raising_sq) * Complex64::new(0.25 * g, 0.0);
    let half = Complex64::new(0.5, 0.0);
    &gen * r - r * &gen + &ops.lowering * r * &ops.raising - (&ops.number * r + r * &ops.number) * half
}

/// Quadrature noise, photon number and g² with `X = b + b†`,
/// `Y = −i(b − b†)`.
pub fn observables_from_rho(rho: &FockDensityMatrix) -> ObservableSet {
    let r = &rho.entries;
    let n = r.nrows();
    let mut b = ZERO;
    let mut b2 = ZERO;
    let mut n_mean = 0.0;
    let mut pairs = 0.0;
    for m in 0..n {
        let mf = m as f64;
        let p = r[(m, m)].re;
        n_mean += mf * p;
        pairs += mf * (mf - 1.0) * p;
        if m >= 1 {
            b += mf.sqrt() * r[(m, m - 1)];
        }
        if m >= 2 {
            b2 += (mf * (mf - 1.0)).sqrt() * r[(m, m - 2)];
        }
    }
    let var_x = 2.0 * b2.re + 2.0 * n_mean + 1.0 - (2.0 * b.re).powi(2);
    let var_y = -2.0 * b2.re + 2.0 * n_mean + 1.0 - (2.0 * b.im).powi(2);
    let (dx, dy) = (var_x.max(0.0).sqrt(), var_y.max(0.0).sqrt());
    ObservableSet {
        dx,
        dy,
        product: dx * dy,
        n_mean,
        g2: (n_mean > G2_MIN_PHOTONS).then(|| pairs / (n_mean * n_mean)),
    }
}

/// Real squeeze operator `exp[(u/2)(b² − b†²)]` on the truncated basis.
fn real_squeeze(u: f64, dim: usize) -> DMatrix<f64> {
    let gen = DMatrix::from_fn(dim, dim, |m, k| {
        if k == m + 2 {
            0.5 * u * ((k * (k - 1)) as f64).sqrt()
        } else if m == k + 2 {
            -0.5 * u * ((m * (m - 1)) as f64).sqrt()
        } else {
            0.0
        }
    });
    expm(&gen)
}

/// `S(ξ) = exp[½(ξ* b² − ξ b†²)]` built directly from the complex generator.
pub fn squeeze_operator(xi: Complex64, ops: &LadderOperators) -> DMatrix<Complex64> {
    let gen = (&ops.lowering_sq * xi.conj() - &ops.raising_sq * xi) * Complex64::new(0.5, 0.0);
    expm(&gen)
}

/// `S(ξ) ρ_T(n_th) S†(ξ)` on `dim` number states.
///
/// The phase enters through `S(u e^{iφ}) = R S(u) R†` with
/// `R = e^{iφ b†b/2}`, so only a real exponential is needed.
pub fn sts_density_matrix(u: f64, phi: f64, n_th: f64, dim: usize) -> Result<FockDensityMatrix> {
    StsState::new(u, phi, n_th)?;
    if dim < 2 {
        return Err(Error::Size { dim });
    }
    let tail = (n_th / (n_th + 1.0)).powi(dim as i32);
    if tail >= THERMAL_TAIL_TOL {
        return Err(Error::Truncation {
            tau: f64::NAN,
            dim,
            n_mean: n_th,
            msg: format!("thermal tail {tail:e} beyond the basis"),
        });
    }
    let w = thermal_weights(n_th, dim)?;
    let rho_real = if u == 0.0 {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(w))
    } else {
        let s = real_squeeze(u, dim);
        let mut sw = s.clone();
        for (j, mut col) in sw.column_iter_mut().enumerate() {
            col *= w[j];
        }
        sw * s.transpose()
    };
    let entries = DMatrix::from_fn(dim, dim, |m, k| {
        let x = rho_real[(m, k)];
        if phi == 0.0 || m == k {
            Complex64::new(x, 0.0)
        } else {
            Complex64::from_polar(x, 0.5 * phi * (m as f64 - k as f64))
        }
    });
    let rho = FockDensityMatrix { entries };
    let top = rho.top_population();
    if top >= TRUNCATION_TOL {
        return Err(Error::Truncation {
            tau: f64::NAN,
            dim,
            n_mean: rho.mean_photon(),
            msg: format!("reconstructed state has top-level population {top:e}"),
        });
    }
    Ok(rho)
}

pub fn sts_density_matrix_for(state: &StsState, dim: usize) -> Result<FockDensityMatrix> {
    sts_density_matrix(state.u, state.phi, state.n_th, dim)
}

/// Running diagnostics of a Fock evolution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolutionStats {
    pub steps: usize,
    pub final_dim: usize,
    pub max_trace_drift: f64,
    /// Largest `max|ρ − ρ†|` seen after a step, before hermitization.
    pub max_hermitian_drift: f64,
    pub tau_reached: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockTrajectory {
    pub tau_grid: Vec<f64>,
    pub states: Vec<FockDensityMatrix>,
    pub stats: EvolutionStats,
}

fn rk4_step(rho: &FockDensityMatrix, g: f64, h: f64) -> FockDensityMatrix {
    let shifted = |k: &DMatrix<Complex64>, f: f64| FockDensityMatrix {
        entries: &rho.entries + k * Complex64::new(f, 0.0),
    };
    let k1 = lindblad_rhs(rho, g);
    let k2 = lindblad_rhs(&shifted(&k1, 0.5 * h), g);
    let k3 = lindblad_rhs(&shifted(&k2, 0.5 * h), g);
    let k4 = lindblad_rhs(&shifted(&k3, h), g);
    let sum = k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4;
    shifted(&sum, h / 6.0)
}

/// Evolves `rho0` over the control's grid, calling `visit` at every sample.
///
/// The basis doubles whenever the top two levels hold more than
/// [`TRUNCATION_TOL`]; exceeding `max_dim` is a truncation error. When the
/// error comes back, `stats` (if provided) still holds the progress made.
pub fn evolve_rho_with<F>(
    rho0: &FockDensityMatrix,
    g: f64,
    ctrl: &IntegrationControl,
    max_dim: usize,
    stats_out: Option<&mut EvolutionStats>,
    mut visit: F,
) -> Result<EvolutionStats>
where
    F: FnMut(f64, &FockDensityMatrix) -> Result<()>,
{
    let mut local = EvolutionStats::default();
    let stats = stats_out.unwrap_or(&mut local);
    *stats = EvolutionStats {
        final_dim: rho0.dim(),
        ..Default::default()
    };
    ctrl.validate()?;
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::Domain {
            op: "evolve_rho",
            msg: format!("g must be finite and nonnegative, got {g}"),
        });
    }
    let mut rho = rho0.clone();
    let drift = (rho.trace() - 1.0).abs();
    if drift > TRACE_TOL {
        return Err(Error::TraceDrift {
            tau: 0.0,
            trace: rho.trace(),
        });
    }
    rho.hermitize();
    let mut rho = escalate(rho, 0.0, max_dim)?;
    stats.final_dim = rho.dim();
    stats.max_trace_drift = drift;
    visit(0.0, &rho)?;

    let mut tau = 0.0;
    for k in 1..=ctrl.n_steps() {
        let next_tau = ctrl.tau_at(k);
        let mut next = rk4_step(&rho, g, next_tau - tau);
        stats.max_hermitian_drift = stats.max_hermitian_drift.max(next.hermiticity_error());
        next.hermitize();
        let trace = next.trace();
        stats.max_trace_drift = stats.max_trace_drift.max((trace - 1.0).abs());
        if !((trace - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::TraceDrift { tau: next_tau, trace });
        }
        rho = escalate(next, next_tau, max_dim)?;
        tau = next_tau;
        stats.steps = k;
        stats.final_dim = rho.dim();
        stats.tau_reached = tau;
        if ctrl.is_sample(k) {
            visit(tau, &rho)?;
        }
    }
    Ok(*stats)
}

fn escalate(mut rho: FockDensityMatrix, tau: f64, max_dim: usize) -> Result<FockDensityMatrix> {
    while rho.top_population() > TRUNCATION_TOL {
        let new_dim = rho.dim() * 2;
        if new_dim > max_dim {
            return Err(Error::Truncation {
                tau,
                dim: rho.dim(),
                n_mean: rho.mean_photon(),
                msg: format!(
                    "top-level population {:e} and the basis cap {max_dim} is reached",
                    rho.top_population()
                ),
            });
        }
        rho = rho.embed(new_dim);
    }
    Ok(rho)
}

/// Collects every sampled density matrix.
pub fn evolve_rho(
    rho0: &FockDensityMatrix,
    g: f64,
    ctrl: &IntegrationControl,
    max_dim: usize,
) -> Result<FockTrajectory> {
    let mut tau_grid = Vec::new();
    let mut states = Vec::new();
    let stats = evolve_rho_with(rho0, g, ctrl, max_dim, None, |tau, rho| {
        tau_grid.push(tau);
        states.push(rho.clone());
        Ok(())
    })?;
    Ok(FockTrajectory {
        tau_grid,
        states,
        stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub initial_dim: usize,
    pub max_dim: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            initial_dim: 64,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

/// Maximum deviations between the analytic trajectory and the Fock evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub g: f64,
    pub samples_compared: usize,
    pub max_dev_dx: f64,
    pub max_dev_dy: f64,
    pub max_dev_n_mean: f64,
    /// Over samples where both g² values are defined.
    pub max_dev_g2: f64,
    pub max_trace_distance: f64,
    /// `|tr ρ² − 1/(2n_th+1)|`.
    pub max_purity_dev: f64,
    pub max_trace_drift: f64,
    pub max_hermitian_drift: f64,
    pub final_dim: usize,
    /// Last τ at which both paths were compared.
    pub usable_tau_end: f64,
    /// Set when the Fock basis ran out before the end of the trajectory.
    pub truncation: Option<String>,
}

impl OracleReport {
    pub fn max_observable_dev(&self) -> f64 {
        self.max_dev_dx.max(self.max_dev_dy).max(self.max_dev_n_mean)
    }
}

/// STS density matrix in the smallest basis of `dim·2^k ≤ max_dim` that
/// holds it.
fn reconstruct_within(state: &StsState, dim: usize, max_dim: usize) -> Result<FockDensityMatrix> {
    let mut n = dim;
    loop {
        match sts_density_matrix_for(state, n) {
            Err(Error::Truncation { .. }) if n * 2 <= max_dim => n *= 2,
            other => return other,
        }
    }
}

/// Runs the Fock oracle on the analytic trajectory's grid and reports the
/// worst disagreement. Truncation failures end the comparison early and are
/// recorded in the report rather than returned.
pub fn compare_trajectories(
    analytic: &Trajectory,
    g: f64,
    ctrl: &IntegrationControl,
    settings: OracleSettings,
) -> Result<OracleReport> {
    let Some(initial) = analytic.states.first() else {
        return Err(Error::InvalidControl("empty analytic trajectory".into()));
    };
    let rho0 = if initial.is_vacuum() {
        FockDensityMatrix::vacuum(settings.initial_dim)?
    } else {
        sts_density_matrix_for(initial, settings.initial_dim)?
    };
    let mut report = OracleReport {
        g,
        samples_compared: 0,
        max_dev_dx: 0.0,
        max_dev_dy: 0.0,
        max_dev_n_mean: 0.0,
        max_dev_g2: 0.0,
        max_trace_distance: 0.0,
        max_purity_dev: 0.0,
        max_trace_drift: 0.0,
        max_hermitian_drift: 0.0,
        final_dim: rho0.dim(),
        usable_tau_end: 0.0,
        truncation: None,
    };
    let mut idx = 0usize;
    let mut stats = EvolutionStats::default();
    let outcome = evolve_rho_with(&rho0, g, ctrl, settings.max_dim, Some(&mut stats), |tau, rho| {
        let Some(&expected_tau) = analytic.tau_grid.get(idx) else {
            return Err(Error::GridMismatch {
                analytic: f64::NAN,
                oracle: tau,
            });
        };
        if (expected_tau - tau).abs() > 1e-9 {
            return Err(Error::GridMismatch {
                analytic: expected_tau,
                oracle: tau,
            });
        }
        let state = &analytic.states[idx];
        let a = &analytic.observables[idx];
        let o = observables_from_rho(rho);
        report.max_dev_dx = report.max_dev_dx.max((a.dx - o.dx).abs());
        report.max_dev_dy = report.max_dev_dy.max((a.dy - o.dy).abs());
        report.max_dev_n_mean = report.max_dev_n_mean.max((a.n_mean - o.n_mean).abs());
        if let (Some(x), Some(y)) = (a.g2, o.g2) {
            report.max_dev_g2 = report.max_dev_g2.max((x - y).abs());
        }
        let recon = reconstruct_within(state, rho.dim(), settings.max_dim)?;
        report.max_trace_distance = report.max_trace_distance.max(rho.trace_distance(&recon));
        let purity = 1.0 / (2.0 * state.n_th + 1.0);
        report.max_purity_dev = report.max_purity_dev.max((rho.purity() - purity).abs());
        report.samples_compared += 1;
        report.usable_tau_end = tau;
        idx += 1;
        Ok(())
    });
    report.max_trace_drift = stats.max_trace_drift;
    report.max_hermitian_drift = stats.max_hermitian_drift;
    report.final_dim = stats.final_dim;
    match outcome {
        Ok(_) => Ok(report),
        Err(e @ Error::Truncation { .. }) => {
            report.truncation = Some(e.to_string());
            Ok(report)
        }
        Err(e) => Err(e),
    }
}
