//! Brute-force validation by dense propagation in a truncated Fock space.
//!
//! The Hamiltonian is written out as a matrix in the interleaved basis
//! `|g,0⟩, |e,0⟩, |g,1⟩, |e,1⟩, …`, diagonalized once, and applied to the
//! initial state as `V exp(-iΛτ/λ) Vᵀ ψ₀`. Nothing here reuses the block
//! formulas in [`crate::dynamics`].
//!
//! Interaction matrix elements are `λ sqrt(n+1)`, the normalization under
//! which the block Rabi frequencies are `(λ/2) sqrt(4n + β²)` (JC) and
//! `(λ/2) sqrt(4n + 4 + (β+2ξ)²)` (AJC).

use std::fmt::Write as _;

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{AtomDensity, CouplingConfig, ModelKind};
use crate::error::{Error, Result};
use crate::observables::{Sample, TimeSeries, Trajectory};
use crate::special::NeumaierSum;
use crate::squeezed::PhotonDistribution;

/// Extra Fock levels above the distribution's `n_max`.
pub const ORACLE_MARGIN: usize = 8;

/// Largest accepted `max |HV - VΛ|`, relative to `max |h_ij|`.
const RESIDUAL_TOL: f64 = 1e-12;

/// Which Hamiltonian to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleModel {
    Jc,
    Ajc,
    /// `(H_JC + H_AJC) / 2`.
    Rabi,
}

impl From<ModelKind> for OracleModel {
    fn from(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Jc => OracleModel::Jc,
            ModelKind::Ajc => OracleModel::Ajc,
        }
    }
}

fn g_index(n: usize) -> usize {
    2 * n
}

fn e_index(n: usize) -> usize {
    2 * n + 1
}

/// Dense Hamiltonian on Fock levels `0..=n_cut`.
#[derive(Debug, Clone)]
pub struct TruncatedHamiltonian {
    pub model: OracleModel,
    pub n_cut: usize,
    pub entries: DMatrix<f64>,
    /// `λ`, needed to turn scaled time back into physical time.
    pub lambda: f64,
}

impl TruncatedHamiltonian {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Adds `shift · I`; observables must not change.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.dim() {
            out.entries[(i, i)] += shift;
        }
        out
    }

    /// Nonzero entries as `row,col,value` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,value\n");
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let v = self.entries[(i, j)];
                if v != 0.0 {
                    let _ = writeln!(out, "{i},{j},{v:.12e}");
                }
            }
        }
        out
    }
}

fn jc_matrix(cfg: &CouplingConfig, n_cut: usize) -> DMatrix<f64> {
    let dim = 2 * (n_cut + 1);
    let (w, d, lam) = (cfg.field_frequency(), cfg.detuning(), cfg.lambda);
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..=n_cut {
        let nf = n as f64;
        // ω(â†â + ŝ₊ŝ₋) + δ ŝ_z - ω/2
        h[(g_index(n), g_index(n))] = w * nf - 0.5 * d - 0.5 * w;
        h[(e_index(n), e_index(n))] = w * (nf + 1.0) + 0.5 * d - 0.5 * w;
        if n < n_cut {
            let k = lam * (nf + 1.0).sqrt();
            h[(e_index(n), g_index(n + 1))] = k;
            h[(g_index(n + 1), e_index(n))] = k;
        }
    }
    h
}

fn ajc_matrix(cfg: &CouplingConfig, n_cut: usize) -> DMatrix<f64> {
    let dim = 2 * (n_cut + 1);
    let (w, db, lam) = (cfg.field_frequency(), cfg.sum_frequency(), cfg.lambda);
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..=n_cut {
        let nf = n as f64;
        // ω(ââ† + ŝ₋ŝ₊) + δ̄ ŝ_z - ω/2
        h[(g_index(n), g_index(n))] = w * (nf + 2.0) - 0.5 * db - 0.5 * w;
        h[(e_index(n), e_index(n))] = w * (nf + 1.0) + 0.5 * db - 0.5 * w;
        if n < n_cut {
            let k = lam * (nf + 1.0).sqrt();
            h[(g_index(n), e_index(n + 1))] = k;
            h[(e_index(n + 1), g_index(n))] = k;
        }
    }
    h
}

/// Builds the truncated Hamiltonian, including the `-ω/2` offset.
pub fn build_hamiltonian(
    model: OracleModel,
    cfg: &CouplingConfig,
    n_cut: usize,
) -> Result<TruncatedHamiltonian> {
    if n_cut < 1 {
        return Err(Error::Config(format!(
            "oracle Fock cutoff must be >= 1, got {n_cut}"
        )));
    }
    if !(cfg.lambda > 0.0) {
        return Err(Error::Config(format!(
            "coupling lambda must be > 0, got {}",
            cfg.lambda
        )));
    }
    let entries = match model {
        OracleModel::Jc => jc_matrix(cfg, n_cut),
        OracleModel::Ajc => ajc_matrix(cfg, n_cut),
        OracleModel::Rabi => (jc_matrix(cfg, n_cut) + ajc_matrix(cfg, n_cut)) * 0.5,
    };
    Ok(TruncatedHamiltonian {
        model,
        n_cut,
        entries,
        lambda: cfg.lambda,
    })
}

/// Diagonal matrix of the conserved excitation number for `model`.
///
/// JC conserves `â†â + ŝ₊ŝ₋`, AJC conserves `ââ† + ŝ₋ŝ₊`.
pub fn excitation_number(kind: ModelKind, n_cut: usize) -> DMatrix<f64> {
    let dim = 2 * (n_cut + 1);
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..=n_cut {
        let nf = n as f64;
        let (g, e) = match kind {
            ModelKind::Jc => (nf, nf + 1.0),
            ModelKind::Ajc => (nf + 2.0, nf + 1.0),
        };
        m[(g_index(n), g_index(n))] = g;
        m[(e_index(n), e_index(n))] = e;
    }
    m
}

/// State vector after propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedState {
    pub tau: f64,
    pub coeffs: Vec<Complex64>,
    /// Probability in the two highest Fock levels.
    pub leakage: f64,
}

impl PropagatedState {
    pub fn n_cut(&self) -> usize {
        self.coeffs.len() / 2 - 1
    }

    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|z| z.norm_sqr())
            .collect::<NeumaierSum>()
            .total()
            .sqrt()
    }

    pub fn photon_probabilities(&self) -> Vec<f64> {
        self.coeffs
            .chunks_exact(2)
            .map(|ge| ge[0].norm_sqr() + ge[1].norm_sqr())
            .collect()
    }

    pub fn atom_density(&self) -> AtomDensity {
        let (mut gg, mut ee) = (NeumaierSum::default(), NeumaierSum::default());
        let (mut re, mut im) = (NeumaierSum::default(), NeumaierSum::default());
        for ge in self.coeffs.chunks_exact(2) {
            gg.add(ge[0].norm_sqr());
            ee.add(ge[1].norm_sqr());
            let z = ge[0] * ge[1].conj();
            re.add(z.re);
            im.add(z.im);
        }
        AtomDensity {
            rho_gg: gg.total(),
            rho_ee: ee.total(),
            rho_ge: Complex64::new(re.total(), im.total()),
        }
    }
}

/// Eigensystem of a [`TruncatedHamiltonian`], reusable across times.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    lambda: f64,
}

impl Propagator {
    pub fn new(h: &TruncatedHamiltonian) -> Result<Self> {
        let dim = h.dim();
        let diagnostics = || {
            format!(
                "dim {dim}, Frobenius norm {:.6e}, max |h_ij| {:.6e}",
                h.entries.norm(),
                h.entries.amax()
            )
        };
        let a = Mat::<f64>::from_fn(dim, dim, |i, j| h.entries[(i, j)]);
        let eig = a.self_adjoint_eigen(Side::Lower).map_err(|e| {
            Error::Numerical(format!(
                "symmetric eigendecomposition failed ({e:?}; {})",
                diagnostics()
            ))
        })?;
        let (u, s) = (eig.U(), eig.S().column_vector());
        let eigenvectors = DMatrix::from_fn(dim, dim, |i, j| u[(i, j)]);
        let eigenvalues = DVector::from_fn(dim, |i, _| s[i]);

        // cheap insurance against a silently wrong decomposition
        let residual = (&h.entries * &eigenvectors
            - &eigenvectors * DMatrix::from_diagonal(&eigenvalues))
        .amax();
        let bound = RESIDUAL_TOL * h.entries.amax().max(1.0);
        if !(residual <= bound) {
            return Err(Error::Numerical(format!(
                "eigendecomposition residual {residual:.3e} exceeds {bound:.3e} ({})",
                diagnostics()
            )));
        }
        Ok(Propagator {
            eigenvalues,
            eigenvectors,
            lambda: h.lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors, one per column, in eigenvalue order.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Coordinates of `initial` in the eigenbasis.
    pub fn project(&self, initial: &[Complex64]) -> Result<Vec<Complex64>> {
        if initial.len() != self.dim() {
            return Err(Error::Usage(format!(
                "state has length {}, Hamiltonian has dim {}",
                initial.len(),
                self.dim()
            )));
        }
        let v = &self.eigenvectors;
        Ok((0..self.dim())
            .map(|k| {
                let (mut re, mut im) = (NeumaierSum::default(), NeumaierSum::default());
                for (i, c) in initial.iter().enumerate() {
                    re.add(v[(i, k)] * c.re);
                    im.add(v[(i, k)] * c.im);
                }
                Complex64::new(re.total(), im.total())
            })
            .collect())
    }

    /// Propagates from eigenbasis coordinates produced by [`Propagator::project`].
    pub fn propagate_projected(&self, projected: &[Complex64], tau: f64) -> PropagatedState {
        let t = tau / self.lambda;
        let rotated: Vec<Complex64> = projected
            .iter()
            .zip(self.eigenvalues.iter())
            .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t))
            .collect();
        let v = &self.eigenvectors;
        let coeffs: Vec<Complex64> = (0..self.dim())
            .map(|i| {
                let (mut re, mut im) = (NeumaierSum::default(), NeumaierSum::default());
                for (k, c) in rotated.iter().enumerate() {
                    re.add(v[(i, k)] * c.re);
                    im.add(v[(i, k)] * c.im);
                }
                Complex64::new(re.total(), im.total())
            })
            .collect();
        let top = coeffs.len().saturating_sub(4);
        let leakage = coeffs[top..].iter().map(|z| z.norm_sqr()).sum();
        PropagatedState {
            tau,
            coeffs,
            leakage,
        }
    }

    pub fn propagate(&self, initial: &[Complex64], tau: f64) -> Result<PropagatedState> {
        let norm = initial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Usage(format!(
                "initial state must be normalized, |ψ| = {norm}"
            )));
        }
        Ok(self.propagate_projected(&self.project(initial)?, tau))
    }
}

/// One-shot propagation `exp(-iHτ/λ) ψ₀`.
pub fn propagate(
    h: &TruncatedHamiltonian,
    initial: &[Complex64],
    tau: f64,
) -> Result<PropagatedState> {
    Propagator::new(h)?.propagate(initial, tau)
}

/// `Σ S_n |g,n⟩` padded with zeros up to `n_cut`.
pub fn initial_state(dist: &PhotonDistribution, n_cut: usize) -> Result<Vec<Complex64>> {
    if n_cut < dist.n_max() {
        return Err(Error::Config(format!(
            "oracle cutoff {n_cut} below distribution n_max {}",
            dist.n_max()
        )));
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); 2 * (n_cut + 1)];
    for (n, s) in dist.amplitudes().iter().enumerate() {
        psi[g_index(n)] = Complex64::new(*s, 0.0);
    }
    Ok(psi)
}

/// Oracle evolution of `|g⟩ ⊗ field` for one scenario.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub kind: ModelKind,
    pub hamiltonian: TruncatedHamiltonian,
    propagator: Propagator,
    projected: Vec<Complex64>,
}

impl OracleRun {
    /// Cutoff `dist.n_max() + ORACLE_MARGIN`.
    pub fn new(dist: &PhotonDistribution, cfg: &CouplingConfig) -> Result<Self> {
        Self::with_cutoff(dist, cfg, dist.n_max() + ORACLE_MARGIN)
    }

    pub fn with_cutoff(
        dist: &PhotonDistribution,
        cfg: &CouplingConfig,
        n_cut: usize,
    ) -> Result<Self> {
        let hamiltonian = build_hamiltonian(cfg.kind.into(), cfg, n_cut)?;
        let propagator = Propagator::new(&hamiltonian)?;
        let projected = propagator.project(&initial_state(dist, n_cut)?)?;
        Ok(OracleRun {
            kind: cfg.kind,
            hamiltonian,
            propagator,
            projected,
        })
    }

    pub fn state(&self, tau: f64) -> PropagatedState {
        self.propagator.propagate_projected(&self.projected, tau)
    }

    pub fn sample(&self, tau: f64) -> Sample {
        let st = self.state(tau);
        Sample::from_parts(
            tau,
            &st.photon_probabilities(),
            st.atom_density().bloch_vector(),
            self.kind,
        )
    }

    pub fn trajectory(&self, taus: &[f64]) -> Trajectory {
        Trajectory {
            kind: self.kind,
            samples: taus.par_iter().map(|&t| self.sample(t)).collect(),
        }
    }
}

/// Largest pointwise disagreement between two series on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub label: String,
    pub max_abs_diff: f64,
    pub argmax_tau: f64,
}

impl ComparisonReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_abs_diff <= tolerance
    }
}

pub fn compare(closed: &TimeSeries, oracle: &TimeSeries) -> Result<ComparisonReport> {
    if closed.taus() != oracle.taus() {
        return Err(Error::Usage(format!(
            "cannot compare '{}' and '{}': time grids differ",
            closed.label(),
            oracle.label()
        )));
    }
    let mut report = ComparisonReport {
        label: closed.label().to_string(),
        max_abs_diff: 0.0,
        argmax_tau: f64::NAN,
    };
    if let Some(&t0) = closed.taus().first() {
        report.argmax_tau = t0;
    }
    for ((tau, a), b) in closed.iter().zip(oracle.values()) {
        let d = (a - b).abs();
        if d > report.max_abs_diff || d.is_nan() {
            report.max_abs_diff = d;
            report.argmax_tau = tau;
            if d.is_nan() {
                break;
            }
        }
    }
    Ok(report)
}

/// Plain-text table of comparison reports.
pub fn format_reports(reports: &[ComparisonReport], tolerance: f64) -> String {
    let mut out = format!(
        "{:<24} {:>14} {:>10}  result (tol {tolerance:e})\n",
        "observable", "max |diff|", "at tau"
    );
    for r in reports {
        let verdict = if r.passes(tolerance) { "pass" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{:<24} {:>14.3e} {:>10.4}  {verdict}",
            r.label, r.max_abs_diff, r.argmax_tau
        );
    }
    out
}
