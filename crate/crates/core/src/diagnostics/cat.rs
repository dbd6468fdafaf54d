use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::model::collective_spin_matrices;
use crate::{Error, ModelParams, Result};

const NORM_TOL: f64 = 1e-8;

/// Weights of the two cat references inside the ground doublet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatOverlap {
    pub f_plus: f64,
    pub f_minus: f64,
}

/// Project `(|+S_x⟩ ± |−S_x⟩)/√2 ⊗ |0⟩` onto the span of `ground_pair`.
///
/// `|−S_x⟩` is fixed as the π rotation of `|+S_x⟩` about z, so the `+` cat
/// lives on even spin slots and the `−` cat on odd ones.
pub fn cat_overlap(
    ground_pair: &DMatrix<f64>,
    p: &ModelParams,
    fock_cutoff: usize,
) -> Result<CatOverlap> {
    let spin_dim = p.spin_dim();
    let dim = (fock_cutoff + 1) * spin_dim;
    if ground_pair.nrows() != dim || ground_pair.ncols() != 2 {
        return Err(Error::invalid(format!(
            "expected a {dim}×2 ground pair, got {:?}",
            ground_pair.shape()
        )));
    }
    let gram = ground_pair.transpose() * ground_pair;
    let off = (gram - DMatrix::<f64>::identity(2, 2)).abs().max();
    if off > NORM_TOL {
        return Err(Error::invalid(format!(
            "ground pair is not orthonormal (Gram deviation {off:.2e})"
        )));
    }

    let ops = collective_spin_matrices(p.spin())?;
    let eig = SymmetricEigen::new(ops.sx);
    let top = eig.eigenvalues.imax();
    let mut plus: DVector<f64> = eig.eigenvectors.column(top).into_owned();
    if plus[0] < 0.0 {
        plus = -plus;
    }
    let minus = DVector::from_fn(spin_dim, |j, _| if j % 2 == 0 { plus[j] } else { -plus[j] });

    let weight = |spin_state: DVector<f64>| -> f64 {
        let mut full = DVector::zeros(dim);
        full.rows_mut(0, spin_dim).copy_from(&spin_state);
        (ground_pair.transpose() * full)
            .norm_squared()
            .clamp(0.0, 1.0)
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(CatOverlap {
        f_plus: weight((&plus + &minus) * s),
        f_minus: weight((&plus - &minus) * s),
    })
}
