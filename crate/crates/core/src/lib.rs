//! Numerical laboratory for the extended Dicke model
//!
//! ```text
//! H = ω a†a + g (a† + a) S_z − v S_x²
//! ```
//!
//! N two-level atoms share one cavity mode and interact all-to-all through
//! the `S_x²` term. The crate builds the model in a truncated Fock ⊗ Dicke
//! basis, diagonalizes it (dense or block Lanczos), and measures the ground
//! doublet splitting `d = E1 − E0` and the gap `Δ = E2 − E1`. For odd N the
//! doublet is exactly degenerate; for even N it splits by an amount that
//! decays exponentially with N.
//!
//! The displacement `a → a − (g/ω) S_z` removes the cavity when `v = 0` and
//! leaves `−u S_z² − v S_x²` with `u = g²/ω`. For `v > 0` the displaced `S_x²`
//! term still couples to the cavity, so the reduced model is an approximation
//! there. It serves as a fast spin-only path and as a reference whose
//! deviation from the full diagonalization is reported per sweep point.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod diagnostics;
pub mod eigen;
mod error;
pub mod model;
pub mod semiclassics;
pub mod sparse;
pub mod sweep;

pub use eigen::{SolverKind, SolverOptions, SpectrumResult};
pub use error::{Error, Result};
pub use model::{BasisIndex, ModelParams};
pub use sparse::SparseOperator;
