//! Thick-restarted block Lanczos with full reorthogonalization.
//!
//! Each cycle grows an orthonormal basis `V` block by block from `H·V_last`,
//! reorthogonalizing every new vector against all of `V` (two Gram-Schmidt
//! passes). The projection `T = Vᵀ H V` is accumulated from the stored
//! images `H·V`; before the first restart it is block tridiagonal. When the
//! basis is full, the lowest Ritz pairs are kept and the next block is drawn
//! from their residuals. Convergence is judged on explicit residual norms.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LinearOperator, SolverKind, SolverOptions, SpectrumResult};
use crate::{Error, Result};

/// A new direction survives only if this fraction of it is orthogonal to the basis.
const DEFLATION_RATIO: f64 = 1e-10;
const RANDOM_FILL_ATTEMPTS: usize = 8;

pub fn lanczos_lowest<A: LinearOperator + ?Sized>(
    h: &A,
    opts: &SolverOptions,
) -> Result<SpectrumResult> {
    let n = h.dim();
    let k = opts.k;
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={n}")));
    }
    if opts.block_size < 2 {
        return Err(Error::invalid("block size must be at least 2"));
    }
    if !(opts.residual_tol > 0.0) {
        return Err(Error::invalid("residual tolerance must be positive"));
    }

    let block = opts.block_size.min(n);
    let max_basis = n.min((4 * (k + block)).max(48));
    let keep = (k + block).min(max_basis.saturating_sub(block)).max(k);
    let budget = opts.max_iterations.unwrap_or(10 * n);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut space = KrylovSpace::new(n);
    let mut candidates: Vec<Vec<f64>> = (0..block).map(|_| random_vector(&mut rng, n)).collect();
    let mut matvecs = 0usize;

    loop {
        // Expansion: block Lanczos steps until the basis is full.
        loop {
            let start = space.len();
            space.extend(h, candidates, block, &mut rng);
            let added = space.len() - start;
            matvecs += added;
            let full = space.len() >= max_basis || space.len() == n;
            let out_of_budget = matvecs >= budget && space.len() >= k;
            if added == 0 || full || out_of_budget {
                break;
            }
            candidates = space.images[start..].to_vec();
        }

        let ritz = space.rayleigh_ritz(keep.min(space.len()));
        let norm_est = ritz
            .all_values
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        let threshold = opts.residual_tol * norm_est;
        let exhausted = space.len() == n;
        let converged = exhausted || ritz.residual_norms[..k].iter().all(|&r| r <= threshold);

        if converged || matvecs >= budget {
            let eigenvectors = opts
                .want_vectors
                .then(|| DMatrix::from_fn(n, k, |r, c| ritz.vectors[c][r]));
            return Ok(SpectrumResult {
                eigenvalues: ritz.values[..k].to_vec(),
                eigenvectors,
                solver: SolverKind::Lanczos,
                iterations: matvecs,
                residual_norms: ritz.residual_norms[..k].to_vec(),
                converged,
            });
        }

        // Thick restart: keep the lowest Ritz pairs, continue from their residuals.
        let mut order: Vec<usize> = (0..ritz.values.len()).collect();
        order.sort_by(|&a, &b| ritz.residual_norms[b].total_cmp(&ritz.residual_norms[a]));
        candidates = order.iter().map(|&i| ritz.residuals[i].clone()).collect();
        space.restart(ritz.values, ritz.vectors, ritz.images);
    }
}

struct KrylovSpace {
    dim: usize,
    basis: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
    /// Lower triangle of `Vᵀ H V`, row `i` has `i + 1` entries.
    projection: Vec<Vec<f64>>,
}

struct RitzPairs {
    all_values: Vec<f64>,
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
    residuals: Vec<Vec<f64>>,
    residual_norms: Vec<f64>,
}

impl KrylovSpace {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
            images: Vec::new(),
            projection: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    /// Orthonormalize up to `block` candidates against the basis and append
    /// them together with their images. Deflated candidates are replaced by
    /// random directions so the block keeps its width.
    fn extend<A: LinearOperator + ?Sized>(
        &mut self,
        h: &A,
        candidates: Vec<Vec<f64>>,
        block: usize,
        rng: &mut ChaCha8Rng,
    ) {
        let mut accepted = 0;
        for cand in candidates {
            if accepted == block || self.len() == self.dim {
                break;
            }
            if self.try_push(h, cand) {
                accepted += 1;
            }
        }
        let mut attempts = 0;
        while accepted < block && self.len() < self.dim && attempts < RANDOM_FILL_ATTEMPTS {
            if self.try_push(h, random_vector(rng, self.dim)) {
                accepted += 1;
            } else {
                attempts += 1;
            }
        }
    }

    fn try_push<A: LinearOperator + ?Sized>(&mut self, h: &A, mut v: Vec<f64>) -> bool {
        let before = norm(&v);
        if !(before > 0.0) || !before.is_finite() {
            return false;
        }
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let after = norm(&v);
        if after <= DEFLATION_RATIO * before || after < f64::MIN_POSITIVE {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= after);

        let mut hv = vec![0.0; self.dim];
        h.apply(&v, &mut hv);
        let row: Vec<f64> = self
            .basis
            .iter()
            .map(|q| dot(q, &hv))
            .chain(std::iter::once(dot(&v, &hv)))
            .collect();
        self.basis.push(v);
        self.images.push(hv);
        self.projection.push(row);
        true
    }

    fn rayleigh_ritz(&self, wanted: usize) -> RitzPairs {
        let m = self.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i >= j {
                self.projection[i][j]
            } else {
                self.projection[j][i]
            }
        });
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let all_values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

        let mut vectors = Vec::with_capacity(wanted);
        let mut images = Vec::with_capacity(wanted);
        let mut residuals = Vec::with_capacity(wanted);
        let mut residual_norms = Vec::with_capacity(wanted);
        for &col in order.iter().take(wanted) {
            let theta = eig.eigenvalues[col];
            let mut x = vec![0.0; self.dim];
            let mut hx = vec![0.0; self.dim];
            for i in 0..m {
                let y = eig.eigenvectors[(i, col)];
                axpy(y, &self.basis[i], &mut x);
                axpy(y, &self.images[i], &mut hx);
            }
            let r: Vec<f64> = hx.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
            residual_norms.push(norm(&r));
            residuals.push(r);
            vectors.push(x);
            images.push(hx);
        }
        RitzPairs {
            values: all_values[..wanted].to_vec(),
            all_values,
            vectors,
            images,
            residuals,
            residual_norms,
        }
    }

    fn restart(&mut self, values: Vec<f64>, vectors: Vec<Vec<f64>>, images: Vec<Vec<f64>>) {
        self.projection = values
            .iter()
            .enumerate()
            .map(|(i, &theta)| {
                let mut row = vec![0.0; i + 1];
                row[i] = theta;
                row
            })
            .collect();
        self.basis = vectors;
        self.images = images;
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}
