use crate::eigen::{dense_spectrum, lowest_eigenpairs, SolverOptions, SpectrumResult};
use crate::model::{
    build_full_hamiltonian_with_limit, polaron_spin_hamiltonian, DEFAULT_MAX_NONZEROS,
};
use crate::{Error, ModelParams, Result};

/// One round of the cutoff doubling.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffStep {
    pub cutoff: usize,
    /// Lowest `k` levels at this cutoff, ascending.
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Accepted cutoff: its levels agree with the doubled cutoff within `tol`.
    pub m_star: usize,
    pub history: Vec<CutoffStep>,
    /// Cutoff settled and every eigensolve reported convergence.
    pub converged: bool,
    pub tol: f64,
    /// Solve at `m_star`.
    pub spectrum: SpectrumResult,
}

#[derive(Debug, Clone)]
pub struct CutoffSettings {
    /// Largest basis dimension the doubling may reach.
    pub max_dim: usize,
    pub solver: SolverOptions,
}

impl Default for CutoffSettings {
    fn default() -> Self {
        Self {
            max_dim: 400_000,
            solver: SolverOptions::with_k(3),
        }
    }
}

/// `ceil(4·(g S/ω)²) + 10`: the displacement `g m/ω` sets the typical occupation.
pub fn initial_cutoff(p: &ModelParams) -> usize {
    let shift = p.g() * p.spin() / p.omega();
    (4.0 * shift * shift).ceil() as usize + 10
}

pub fn converge_cutoff(p: &ModelParams, tol: f64, k: usize) -> Result<ConvergenceReport> {
    let settings = CutoffSettings {
        solver: SolverOptions::with_k(k),
        ..CutoffSettings::default()
    };
    converge_cutoff_with(p, tol, &settings)
}

/// Double the Fock cutoff from [`initial_cutoff`] until the lowest `k` levels
/// move by less than `tol` between rounds.
pub fn converge_cutoff_with(
    p: &ModelParams,
    tol: f64,
    settings: &CutoffSettings,
) -> Result<ConvergenceReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut cutoff = initial_cutoff(p);
    let mut history: Vec<CutoffStep> = Vec::new();
    let mut previous: Option<SpectrumResult> = None;
    let mut all_converged = true;

    loop {
        let dim = (cutoff + 1) * p.spin_dim();
        if dim > settings.max_dim {
            return Err(Error::CutoffBudget {
                max_dim: settings.max_dim,
                history,
            });
        }
        let spectrum = full_model_levels(p, cutoff, &settings.solver)?;
        all_converged &= spectrum.converged;
        history.push(CutoffStep {
            cutoff,
            energies: spectrum.eigenvalues.clone(),
        });

        if let Some(prev) = previous.take() {
            let moved = prev
                .eigenvalues
                .iter()
                .zip(&spectrum.eigenvalues)
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            if moved < tol {
                return Ok(ConvergenceReport {
                    m_star: history[history.len() - 2].cutoff,
                    history,
                    converged: all_converged,
                    tol,
                    spectrum: prev,
                });
            }
        }
        previous = Some(spectrum);
        cutoff *= 2;
    }
}

pub(crate) fn full_model_levels(
    p: &ModelParams,
    cutoff: usize,
    opts: &SolverOptions,
) -> Result<SpectrumResult> {
    let h = build_full_hamiltonian_with_limit(p, cutoff, DEFAULT_MAX_NONZEROS)?;
    let mut opts = opts.clone();
    opts.k = opts.k.min(h.dim());
    lowest_eigenpairs(&h, &opts)
}

/// Lowest `k` levels of `−u S_z² − v S_x²`.
pub fn spin_model_levels(p: &ModelParams, k: usize) -> Result<SpectrumResult> {
    let h = polaron_spin_hamiltonian(p);
    dense_spectrum(&h, k.min(h.nrows()), false, None)
}

/// Lowest `k` values of `{ε_i + ω n}` with `ε_i` the spin-model levels.
pub fn polaron_ladder(p: &ModelParams, k: usize) -> Result<Vec<f64>> {
    let spin = spin_model_levels(p, p.spin_dim())?.eigenvalues;
    let mut merged: Vec<f64> = (0..k)
        .flat_map(|n| spin.iter().map(move |e| e + p.omega() * n as f64))
        .collect();
    merged.sort_by(f64::total_cmp);
    merged.truncate(k);
    Ok(merged)
}

/// Largest deviation between full-model levels and the polaron ladder.
pub fn oracle_deviation(p: &ModelParams, full_levels: &[f64]) -> Result<f64> {
    let ladder = polaron_ladder(p, full_levels.len())?;
    Ok(full_levels
        .iter()
        .zip(&ladder)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs())))
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub max_abs_deviation: f64,
    pub pass: bool,
    pub m_star: usize,
}

/// Full diagonalization at a converged cutoff against the exact polaron ladder.
pub fn oracle_spectrum_equivalence(p: &ModelParams, k: usize, tol: f64) -> Result<OracleReport> {
    let cutoff_tol = (0.1 * tol).max(1e-11);
    let report = converge_cutoff(p, cutoff_tol, k)?;
    let dev = oracle_deviation(p, &report.spectrum.eigenvalues)?;
    Ok(OracleReport {
        max_abs_deviation: dev,
        pass: dev < tol,
        m_star: report.m_star,
    })
}
