use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{Mode, SweepConfig};
use crate::diagnostics::{
    converge_cutoff_with, degeneracy_classes, oracle_deviation, relative_cluster_tol,
    spin_model_levels, splitting_and_gap, CutoffSettings, DegeneracyReport,
};
use crate::eigen::SolverOptions;
use crate::{Error, ModelParams, Result};

/// Relative clustering tolerance used for the pairing flag.
pub const PAIRING_REL_TOL: f64 = 1e-10;

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: ModelParams,
    /// Accepted Fock cutoff; 0 in spin-only mode.
    pub m_star: usize,
    /// Lowest levels, ascending. Empty when the point failed.
    pub eigenvalues: Vec<f64>,
    /// `E1 − E0`, NaN when unavailable.
    pub d: f64,
    /// `E2 − E1`, NaN when unavailable.
    pub delta: f64,
    pub degeneracy: DegeneracyReport,
    pub pairing_ok: bool,
    /// Distance to the polaron ladder; full mode only.
    pub oracle_deviation: Option<f64>,
    pub converged: bool,
    pub wall_time_seconds: Option<f64>,
    /// Why the point failed, if it did.
    pub error: Option<String>,
}

impl SweepRow {
    /// Level `i`, NaN when missing.
    pub fn level(&self, i: usize) -> f64 {
        self.eigenvalues.get(i).copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Rows in grid order. Shorter than the grid when `aborted`.
    pub rows: Vec<SweepRow>,
    /// The time budget ran out before every point was solved.
    pub aborted: bool,
    pub grid_len: usize,
}

/// Solve every grid point on a worker pool. Row order and contents do not
/// depend on the worker count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let grid = cfg.grid()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.engine.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;

    let start = Instant::now();
    let out_of_time = AtomicBool::new(false);
    let rows: Vec<Option<SweepRow>> = pool.install(|| {
        grid.par_iter()
            .map(|p| {
                if let Some(budget) = cfg.engine.budget_seconds {
                    if out_of_time.load(Ordering::Relaxed) || start.elapsed().as_secs_f64() > budget
                    {
                        out_of_time.store(true, Ordering::Relaxed);
                        return None;
                    }
                }
                Some(solve_point(p, cfg))
            })
            .collect()
    });

    // Keep the contiguous finished prefix so a partial table stays in grid order.
    let aborted = rows.iter().any(Option::is_none);
    let rows: Vec<SweepRow> = rows.into_iter().map_while(|r| r).collect();
    Ok(SweepOutcome {
        rows,
        aborted,
        grid_len: grid.len(),
    })
}

/// Solve one point; failures are recorded in the row rather than returned.
pub fn solve_point(p: &ModelParams, cfg: &SweepConfig) -> SweepRow {
    let clock = Instant::now();
    let solved = match cfg.engine.mode {
        Mode::Full => solve_full(p, cfg),
        Mode::SpinOnly => spin_model_levels(p, cfg.engine.k).map(|s| Solved {
            m_star: 0,
            truncated: s.eigenvalues.len() < p.spin_dim(),
            eigenvalues: s.eigenvalues,
            oracle_deviation: None,
            converged: s.converged,
        }),
    };
    let wall = cfg.engine.timing.then(|| clock.elapsed().as_secs_f64());

    match solved {
        Ok(s) => {
            let (d, delta) = match s.eigenvalues.len() {
                0 | 1 => (f64::NAN, f64::NAN),
                2 => (s.eigenvalues[1] - s.eigenvalues[0], f64::NAN),
                _ => splitting_and_gap(&s.eigenvalues)
                    .map(|sg| (sg.d, sg.delta))
                    .unwrap_or((f64::NAN, f64::NAN)),
            };
            let tol = relative_cluster_tol(&s.eigenvalues, PAIRING_REL_TOL);
            let degeneracy = degeneracy_classes(&s.eigenvalues, tol);
            let pairing_ok = pairing_of_complete_classes(&degeneracy, s.truncated);
            SweepRow {
                params: *p,
                m_star: s.m_star,
                eigenvalues: s.eigenvalues,
                d,
                delta,
                degeneracy,
                pairing_ok,
                oracle_deviation: s.oracle_deviation,
                converged: s.converged,
                wall_time_seconds: wall,
                error: None,
            }
        }
        Err(e) => SweepRow {
            params: *p,
            m_star: match &e {
                Error::CutoffBudget { history, .. } => history.last().map_or(0, |h| h.cutoff),
                _ => 0,
            },
            eigenvalues: Vec::new(),
            d: f64::NAN,
            delta: f64::NAN,
            degeneracy: degeneracy_classes(&[], 0.0),
            pairing_ok: false,
            oracle_deviation: None,
            converged: false,
            wall_time_seconds: wall,
            error: Some(e.to_string()),
        },
    }
}

struct Solved {
    m_star: usize,
    eigenvalues: Vec<f64>,
    /// Only the lowest part of the spectrum was computed.
    truncated: bool,
    oracle_deviation: Option<f64>,
    converged: bool,
}

fn solve_full(p: &ModelParams, cfg: &SweepConfig) -> Result<Solved> {
    let settings = CutoffSettings {
        max_dim: cfg.engine.max_dim,
        solver: SolverOptions {
            seed: cfg.engine.seed,
            ..SolverOptions::with_k(cfg.engine.k)
        },
    };
    let report = converge_cutoff_with(p, cfg.engine.tol, &settings)?;
    let eigenvalues = report.spectrum.eigenvalues;
    let deviation = oracle_deviation(p, &eigenvalues)?;
    Ok(Solved {
        m_star: report.m_star,
        eigenvalues,
        truncated: true,
        oracle_deviation: Some(deviation),
        converged: report.converged,
    })
}

/// Even multiplicity of every class. The top class of a truncated spectrum
/// may be cut short, so it is skipped unless it is the only one.
fn pairing_of_complete_classes(report: &DegeneracyReport, truncated: bool) -> bool {
    let classes = &report.classes;
    let considered = if truncated && classes.len() > 1 {
        &classes[..classes.len() - 1]
    } else {
        &classes[..]
    };
    !considered.is_empty() && considered.iter().all(|(_, m)| m % 2 == 0)
}
