//! Observables and consistency checks built on top of the spectra.

mod cat;
mod cutoff;

pub use cat::{cat_overlap, CatOverlap};
pub use cutoff::{
    converge_cutoff, converge_cutoff_with, initial_cutoff, oracle_deviation,
    oracle_spectrum_equivalence, polaron_ladder, spin_model_levels, ConvergenceReport,
    CutoffSettings, CutoffStep, OracleReport,
};

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Relative clustering tolerance used when classifying degeneracies.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

/// Negative values down to this size are solver noise and clip to zero.
const CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingGap {
    /// Tunnel splitting `E1 − E0`.
    pub d: f64,
    /// Gap above the doublet, `E2 − E1`.
    pub delta: f64,
}

pub fn splitting_and_gap(eigs: &[f64]) -> Result<SplittingGap> {
    if eigs.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 eigenvalues, got {}",
            eigs.len()
        )));
    }
    let clip = |x: f64| if (-CLIP..0.0).contains(&x) { 0.0 } else { x };
    Ok(SplittingGap {
        d: clip(eigs[1] - eigs[0]),
        delta: clip(eigs[2] - eigs[1]),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    /// `(first eigenvalue of the class, multiplicity)`, ascending.
    pub classes: Vec<(f64, usize)>,
    /// Every class has even multiplicity.
    pub pairing_ok: bool,
    pub max_intra_class_spread: f64,
}

/// Greedy ascending clustering: a value joins the current class when it lies
/// within `cluster_tol` of the previous value.
pub fn degeneracy_classes(eigs: &[f64], cluster_tol: f64) -> DegeneracyReport {
    let mut classes: Vec<(f64, usize)> = Vec::new();
    let mut spread = 0.0f64;
    let mut prev = f64::NAN;
    for &e in eigs {
        match classes.last_mut() {
            Some((first, count)) if e - prev <= cluster_tol => {
                *count += 1;
                spread = spread.max(e - *first);
            }
            _ => classes.push((e, 1)),
        }
        prev = e;
    }
    DegeneracyReport {
        pairing_ok: !classes.is_empty() && classes.iter().all(|(_, m)| m % 2 == 0),
        classes,
        max_intra_class_spread: spread,
    }
}

/// Clustering tolerance `rel · |E0|`, falling back to the largest level
/// magnitude when `E0 = 0`.
pub fn relative_cluster_tol(eigs: &[f64], rel: f64) -> f64 {
    let scale = match eigs.first() {
        Some(e0) if *e0 != 0.0 => e0.abs(),
        _ => eigs.iter().fold(0.0f64, |acc, e| acc.max(e.abs())),
    };
    rel * scale
}

/// `‖HR − RH‖_F / ‖H‖_F`.
pub fn symmetry_commutator_norm(h: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<f64> {
    if h.shape() != r.shape() || h.nrows() != h.ncols() {
        return Err(Error::invalid(format!(
            "shape mismatch: H is {:?}, R is {:?}",
            h.shape(),
            r.shape()
        )));
    }
    let comm = (h * r - r * h).norm();
    let scale = h.norm();
    if scale == 0.0 {
        return Ok(if comm == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(comm / scale)
}
