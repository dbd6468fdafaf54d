use nalgebra::{DMatrix, SymmetricEigen};

use super::{residual_norm, SolverKind, SolverOptions, SpectrumResult};
use crate::{Error, Result};

/// Lowest `k` eigenpairs from a full symmetric eigendecomposition.
///
/// `threshold` overrides the size cap; `None` uses the default
/// [`SolverOptions::dense_threshold`].
pub fn dense_spectrum(
    h: &DMatrix<f64>,
    k: usize,
    want_vectors: bool,
    threshold: Option<usize>,
) -> Result<SpectrumResult> {
    let dim = h.nrows();
    if h.ncols() != dim {
        return Err(Error::invalid("matrix must be square"));
    }
    let cap = threshold.unwrap_or(SolverOptions::default().dense_threshold);
    if dim > cap {
        return Err(Error::Resource(format!(
            "dense eigensolve of dimension {dim} exceeds threshold {cap}"
        )));
    }
    if k == 0 || k > dim {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={dim}")));
    }

    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(k);

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, k, |r, c| eig.eigenvectors[(r, order[c])]);
    let residual_norms = (0..k)
        .map(|c| residual_norm(h, vectors.column(c).as_slice(), eigenvalues[c]))
        .collect();

    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors: want_vectors.then_some(vectors),
        solver: SolverKind::Dense,
        iterations: 1,
        residual_norms,
        converged: true,
    })
}
