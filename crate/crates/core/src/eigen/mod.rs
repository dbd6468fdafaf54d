//! Lowest eigenpairs of real symmetric operators.
//!
//! Two paths: a dense reference (`dense_spectrum`) and block Lanczos with
//! full reorthogonalization (`lanczos_lowest`). Block Lanczos keeps exact
//! doublets intact, which a single-vector Krylov method cannot.

mod dense;
mod lanczos;

pub use dense::dense_spectrum;
pub use lanczos::lanczos_lowest;

use nalgebra::DMatrix;

use crate::sparse::SparseOperator;
use crate::Result;

/// Anything that can apply a real symmetric matrix to a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Ascending, length `k`.
    pub eigenvalues: Vec<f64>,
    /// `dim × k`, column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: Option<DMatrix<f64>>,
    pub solver: SolverKind,
    /// Matrix-vector products (Lanczos) or 1 (dense).
    pub iterations: usize,
    pub residual_norms: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub k: usize,
    /// Relative to the spectral-norm estimate.
    pub residual_tol: f64,
    /// Matvec budget; `None` means `10 · dim`.
    pub max_iterations: Option<usize>,
    pub block_size: usize,
    /// Largest dimension `dense_spectrum` accepts unless overridden.
    pub dense_threshold: usize,
    /// `lowest_eigenpairs` uses the dense path at or below this size.
    pub prefer_dense_below: usize,
    pub want_vectors: bool,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            k: 6,
            residual_tol: 1e-10,
            max_iterations: None,
            block_size: 4,
            dense_threshold: 4000,
            prefer_dense_below: 400,
            want_vectors: false,
            seed: 0x5eed,
        }
    }
}

impl SolverOptions {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn vectors(mut self, want: bool) -> Self {
        self.want_vectors = want;
        self
    }
}

/// Dispatch: dense for small operators, block Lanczos otherwise.
pub fn lowest_eigenpairs(h: &SparseOperator, opts: &SolverOptions) -> Result<SpectrumResult> {
    if h.dim() <= opts.prefer_dense_below.min(opts.dense_threshold) {
        dense_spectrum(&h.to_dense(), opts.k, opts.want_vectors, None)
    } else {
        lanczos_lowest(h, opts)
    }
}

pub(crate) fn residual_norm<A: LinearOperator + ?Sized>(h: &A, x: &[f64], lambda: f64) -> f64 {
    let mut hx = vec![0.0; x.len()];
    h.apply(x, &mut hx);
    hx.iter()
        .zip(x)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}
