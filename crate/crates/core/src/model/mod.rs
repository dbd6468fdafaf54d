//! Operators of the extended Dicke model.

mod hamiltonian;
mod spin;

pub use hamiltonian::{
    build_full_hamiltonian, build_full_hamiltonian_with_limit, polaron_spin_hamiltonian,
    symmetry_operator, SymmetryOperator, DEFAULT_MAX_NONZEROS,
};
pub use spin::{collective_spin_matrices, SpinOperatorSet};

use crate::{Error, Result};

/// Physical parameters `(N, ω, g, v)` of one model instance. Energies are
/// angular frequencies with ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n_atoms: usize,
    omega: f64,
    g: f64,
    v: f64,
}

impl ModelParams {
    pub fn new(n_atoms: usize, omega: f64, g: f64, v: f64) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::invalid("atom count N must be at least 1"));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !g.is_finite() {
            return Err(Error::invalid(format!("g must be finite, got {g}")));
        }
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("v must be non-negative, got {v}")));
        }
        Ok(Self {
            n_atoms,
            omega,
            g,
            v,
        })
    }

    /// Parameters with the coupling chosen so that `g²/ω = u` (g ≥ 0).
    pub fn from_u(n_atoms: usize, omega: f64, u: f64, v: f64) -> Result<Self> {
        if !(u.is_finite() && u >= 0.0) {
            return Err(Error::invalid(format!("u must be non-negative, got {u}")));
        }
        Self::new(n_atoms, omega, (u * omega).sqrt(), v)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// Total spin `S = N/2`.
    pub fn spin(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    /// Effective cavity-mediated interaction `u = g²/ω`.
    pub fn u(&self) -> f64 {
        self.g * self.g / self.omega
    }

    pub fn spin_dim(&self) -> usize {
        self.n_atoms + 1
    }
}

/// Flat indexing of the truncated Fock ⊗ Dicke basis.
///
/// Boson-major: `index = n·(N+1) + (m + S)` with `n ∈ 0..=M` and
/// `m ∈ {−S, …, S}` ascending. `m` is carried as `twice_m = 2m` so
/// half-integer spins stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    fock_cutoff: usize,
    n_atoms: usize,
}

impl BasisIndex {
    pub fn new(n_atoms: usize, fock_cutoff: usize) -> Self {
        Self {
            fock_cutoff,
            n_atoms,
        }
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn spin_dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn total_dim(&self) -> usize {
        (self.fock_cutoff + 1) * self.spin_dim()
    }

    /// Flat index of `(n, 2m)`. Returns `None` outside the truncated basis.
    pub fn flat(&self, n: usize, twice_m: i64) -> Option<usize> {
        let offset = twice_m + self.n_atoms as i64;
        if n > self.fock_cutoff || offset < 0 || offset % 2 != 0 {
            return None;
        }
        let spin_pos = (offset / 2) as usize;
        if spin_pos >= self.spin_dim() {
            return None;
        }
        Some(n * self.spin_dim() + spin_pos)
    }

    /// Inverse of [`flat`](Self::flat): `(n, 2m)`.
    pub fn pair(&self, index: usize) -> Option<(usize, i64)> {
        if index >= self.total_dim() {
            return None;
        }
        let n = index / self.spin_dim();
        let spin_pos = (index % self.spin_dim()) as i64;
        Some((n, 2 * spin_pos - self.n_atoms as i64))
    }
}
