//! Fixtures shared by the criterion benches.

use dickelab::model::build_full_hamiltonian;
use dickelab::{ModelParams, SparseOperator};

/// Full model at `u/v = 0.2`, `ω = v = 1`, with the cutoff the sweep would pick.
pub fn model_operator(n_atoms: usize, fock_cutoff: usize) -> SparseOperator {
    let p = ModelParams::from_u(n_atoms, 1.0, 0.2, 1.0).expect("valid parameters");
    build_full_hamiltonian(&p, fock_cutoff).expect("within nonzero budget")
}
