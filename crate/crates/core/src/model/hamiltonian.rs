use nalgebra::DMatrix;

use super::spin::{sx2_diagonal, sx2_raise_by_two, twice_m_at};
use super::{BasisIndex, ModelParams};
use crate::sparse::SparseOperator;
use crate::{Error, Result};

pub const DEFAULT_MAX_NONZEROS: usize = 5_000_000;

/// Full Hamiltonian `ω a†a + g(a†+a)S_z − v S_x²` truncated at `fock_cutoff`
/// bosons, in the boson-major basis of [`BasisIndex`].
pub fn build_full_hamiltonian(p: &ModelParams, fock_cutoff: usize) -> Result<SparseOperator> {
    build_full_hamiltonian_with_limit(p, fock_cutoff, DEFAULT_MAX_NONZEROS)
}

pub fn build_full_hamiltonian_with_limit(
    p: &ModelParams,
    fock_cutoff: usize,
    max_nonzeros: usize,
) -> Result<SparseOperator> {
    let basis = BasisIndex::new(p.n_atoms(), fock_cutoff);
    let spin_dim = basis.spin_dim();
    let dim = fock_cutoff
        .checked_add(1)
        .and_then(|b| b.checked_mul(spin_dim))
        .ok_or_else(|| Error::Resource("basis dimension overflows usize".into()))?;
    // At most 5 entries per row: diagonal, two boson neighbours, two S_x² neighbours.
    let bound = dim.saturating_mul(5);
    if bound > max_nonzeros {
        return Err(Error::Resource(format!(
            "Hamiltonian with M = {fock_cutoff}, N = {} may need {bound} nonzeros (limit {max_nonzeros})",
            p.n_atoms()
        )));
    }

    let twice_s = p.n_atoms();
    let (omega, g, v) = (p.omega(), p.g(), p.v());

    // Per-spin-state tables, shared by every boson block.
    let sx2_diag: Vec<f64> = (0..spin_dim)
        .map(|j| sx2_diagonal(twice_s, twice_m_at(twice_s, j)))
        .collect();
    // coupling between spin slots j and j+2
    let sx2_up: Vec<f64> = (0..spin_dim.saturating_sub(2))
        .map(|j| -v * sx2_raise_by_two(twice_s, twice_m_at(twice_s, j)))
        .collect();
    let sz: Vec<f64> = (0..spin_dim)
        .map(|j| twice_m_at(twice_s, j) as f64 / 2.0)
        .collect();
    // g √(n+1) m couples (n, m) and (n+1, m)
    let boson_up = |n: usize, j: usize| g * ((n + 1) as f64).sqrt() * sz[j];

    let mut rows = Vec::with_capacity(dim);
    for n in 0..=fock_cutoff {
        for j in 0..spin_dim {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(5);
            let mut push = |col: usize, val: f64| {
                if val != 0.0 {
                    row.push((col, val));
                }
            };
            let here = n * spin_dim + j;
            if n > 0 {
                push(here - spin_dim, boson_up(n - 1, j));
            }
            if j >= 2 {
                push(here - 2, sx2_up[j - 2]);
            }
            push(here, omega * n as f64 - v * sx2_diag[j]);
            if j + 2 < spin_dim {
                push(here + 2, sx2_up[j]);
            }
            if n < fock_cutoff {
                push(here + spin_dim, boson_up(n, j));
            }
            rows.push(row);
        }
    }
    Ok(SparseOperator::from_sorted_rows(dim, rows))
}

/// Cavity-free spin Hamiltonian `−u S_z² − v S_x²` obtained by displacing
/// `a → a − (g/ω) S_z`. The full spectrum is this one plus the ladder `ω n`.
pub fn polaron_spin_hamiltonian(p: &ModelParams) -> DMatrix<f64> {
    let twice_s = p.n_atoms();
    let dim = p.spin_dim();
    let (u, v) = (p.u(), p.v());
    let mut h = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let twice_m = twice_m_at(twice_s, j);
        let m = twice_m as f64 / 2.0;
        h[(j, j)] = -u * m * m - v * sx2_diagonal(twice_s, twice_m);
        if j + 2 < dim {
            let off = -v * sx2_raise_by_two(twice_s, twice_m);
            h[(j, j + 2)] = off;
            h[(j + 2, j)] = off;
        }
    }
    h
}

/// The parity-type symmetry `R = exp(iπ a†a) ⊗ exp(−iπ S_x)`.
///
/// `exp(−iπ S_x)|m⟩ = e^{−iπS}|−m⟩`, so `R` is a signed exchange matrix
/// times a global phase. For half-integer `S` that phase is `±i`; it is
/// carried as `imaginary = true` and `R = i · real`.
#[derive(Debug, Clone)]
pub struct SymmetryOperator {
    pub real: SparseOperator,
    pub imaginary: bool,
}

pub fn symmetry_operator(p: &ModelParams, fock_cutoff: usize) -> SymmetryOperator {
    let spin_dim = p.spin_dim();
    let dim = (fock_cutoff + 1) * spin_dim;
    // e^{−iπS} = (−i)^N
    let (scale, imaginary) = match p.n_atoms() % 4 {
        0 => (1.0, false),
        1 => (-1.0, true),
        2 => (-1.0, false),
        _ => (1.0, true),
    };
    let rows = (0..dim)
        .map(|idx| {
            let n = idx / spin_dim;
            let j = idx % spin_dim;
            let sign = if n.is_multiple_of(2) { scale } else { -scale };
            vec![(n * spin_dim + (spin_dim - 1 - j), sign)]
        })
        .collect();
    SymmetryOperator {
        real: SparseOperator::from_sorted_rows(dim, rows),
        imaginary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::collective_spin_matrices;
    use nalgebra::SymmetricEigen;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn free_boson_diagonal() {
        let p = ModelParams::new(1, 1.0, 0.0, 0.0).unwrap();
        let h = build_full_hamiltonian(&p, 2).unwrap();
        assert_eq!(h.dim(), 6);
        let diag: Vec<f64> = (0..6).map(|i| h.get(i, i)).collect();
        assert_eq!(diag, vec![0.0, 0.0, 1.0, 1.0, 2.0, 2.0]);
        // only the n = 1, 2 diagonal entries are nonzero
        assert_eq!(h.nnz(), 4);
    }

    #[test]
    fn dimension() {
        let p = ModelParams::new(2, 1.0, 0.1, 0.05).unwrap();
        assert_eq!(build_full_hamiltonian(&p, 3).unwrap().dim(), 12);
    }

    #[test]
    fn nonzero_budget() {
        let p = ModelParams::new(2, 1.0, 0.1, 0.05).unwrap();
        let err = build_full_hamiltonian_with_limit(&p, 100, 100).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn bitwise_symmetric_and_block_structured() {
        let p = ModelParams::new(5, 1.3, -0.7, 0.9).unwrap();
        let basis = BasisIndex::new(5, 7);
        let h = build_full_hamiltonian(&p, 7).unwrap();
        for (r, c, v) in h.triplets() {
            assert_eq!(h.get(c, r).to_bits(), v.to_bits());
            let (n1, m1) = basis.pair(r).unwrap();
            let (n2, m2) = basis.pair(c).unwrap();
            let dn = n1 as i64 - n2 as i64;
            let dm = m1 - m2;
            let allowed = (dn == 0 && (dm == 0 || dm.abs() == 4)) || (dn.abs() == 1 && dm == 0);
            assert!(allowed, "unexpected entry at ({r}, {c})");
        }
    }

    #[test]
    fn polaron_examples() {
        let p = ModelParams::new(2, 1.0, 0.0, 1.0).unwrap();
        let ops = collective_spin_matrices(1.0).unwrap();
        assert!(max_abs(&(polaron_spin_hamiltonian(&p) + ops.sx_squared())) < 1e-15);

        let p = ModelParams::from_u(2, 1.0, 0.5, 1.0).unwrap();
        let h = polaron_spin_hamiltonian(&p);
        let expected =
            DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, -0.5, 0.0, -1.0, 0.0, -0.5, 0.0, -1.0]);
        assert!(max_abs(&(&h - expected)) < 1e-14);
        let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for (got, want) in eig.iter().zip([-1.5, -1.0, -0.5]) {
            assert!((got - want).abs() < 1e-14);
        }

        for (u, v) in [(0.3, 0.7), (2.0, 0.0), (0.0, 0.0)] {
            let p = ModelParams::from_u(1, 1.0, u, v).unwrap();
            let h = polaron_spin_hamiltonian(&p);
            let expected = DMatrix::identity(2, 2) * (-(u + v) / 4.0);
            assert!(max_abs(&(h - expected)) < 1e-15);
        }
    }

    #[test]
    fn symmetry_phase_factors() {
        // N = 2, M = 2: boson factor diag(+1, −1, +1); spin part −J.
        let p = ModelParams::new(2, 1.0, 0.3, 1.0).unwrap();
        let r = symmetry_operator(&p, 2);
        assert!(!r.imaginary);
        assert_eq!(r.real.get(0, 2), -1.0);
        assert_eq!(r.real.get(1, 1), -1.0);
        assert_eq!(r.real.get(3, 5), 1.0);
        assert_eq!(r.real.get(6, 8), -1.0);
    }

    /// exp(−iπ S_x) through the S_x eigenbasis, compared with the closed form.
    #[test]
    fn spin_rotation_matches_eigendecomposition() {
        for n_atoms in 1..=8usize {
            let s = n_atoms as f64 / 2.0;
            let ops = collective_spin_matrices(s).unwrap();
            let eig = SymmetricEigen::new(ops.sx.clone());
            let cos = DMatrix::from_diagonal(
                &eig.eigenvalues.map(|mx| (std::f64::consts::PI * mx).cos()),
            );
            let sin = DMatrix::from_diagonal(
                &eig.eigenvalues.map(|mx| -(std::f64::consts::PI * mx).sin()),
            );
            let re = &eig.eigenvectors * cos * eig.eigenvectors.transpose();
            let im = &eig.eigenvectors * sin * eig.eigenvectors.transpose();

            let p = ModelParams::new(n_atoms, 1.0, 0.0, 1.0).unwrap();
            let r = symmetry_operator(&p, 0);
            let dense = r.real.to_dense();
            let (want_re, want_im) = if r.imaginary {
                (DMatrix::zeros(n_atoms + 1, n_atoms + 1), dense)
            } else {
                (dense, DMatrix::zeros(n_atoms + 1, n_atoms + 1))
            };
            assert!(max_abs(&(re - want_re)) < 1e-12, "N = {n_atoms}");
            assert!(max_abs(&(im - want_im)) < 1e-12, "N = {n_atoms}");
        }
    }

    #[test]
    fn spin_one_rotation_on_sx_eigenbasis() {
        // exp(−iπ m_x) on m_x = (1, 0, −1) → (−1, +1, −1)
        let ops = collective_spin_matrices(1.0).unwrap();
        let p = ModelParams::new(2, 1.0, 0.0, 0.0).unwrap();
        let r = symmetry_operator(&p, 0).real.to_dense();
        let eig = SymmetricEigen::new(ops.sx);
        for (i, mx) in eig.eigenvalues.iter().enumerate() {
            let vec = eig.eigenvectors.column(i);
            let image = &r * vec;
            let phase = image.dot(&vec);
            let want = if mx.abs() > 0.5 { -1.0 } else { 1.0 };
            assert!((phase - want).abs() < 1e-12);
        }
    }
}
