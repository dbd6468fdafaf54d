use nalgebra::DMatrix;

use crate::{Error, Result};

/// Collective spin matrices in the `S_z` eigenbasis, `m` ascending from `−S`.
///
/// `S_y` is purely imaginary in this basis, so it is kept as its imaginary
/// part: `S_y = i · sy_imag`.
#[derive(Debug, Clone)]
pub struct SpinOperatorSet {
    twice_s: usize,
    pub sx: DMatrix<f64>,
    pub sy_imag: DMatrix<f64>,
    pub sz: DMatrix<f64>,
    pub sp: DMatrix<f64>,
    pub sm: DMatrix<f64>,
}

impl SpinOperatorSet {
    pub fn spin(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice_s + 1
    }

    /// `S_x²` assembled from the ladder formula, exactly symmetric.
    pub fn sx_squared(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            out[(i, i)] = sx2_diagonal(self.twice_s, twice_m_at(self.twice_s, i));
            if i + 2 < dim {
                let val = sx2_raise_by_two(self.twice_s, twice_m_at(self.twice_s, i));
                out[(i, i + 2)] = val;
                out[(i + 2, i)] = val;
            }
        }
        out
    }

    pub fn sz_squared(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.sz.diagonal().map(|m| m * m))
    }
}

/// Spin matrices for total spin `s` (any positive multiple of 1/2).
pub fn collective_spin_matrices(s: f64) -> Result<SpinOperatorSet> {
    let twice = 2.0 * s;
    if !(s.is_finite() && s > 0.0) || twice.fract() != 0.0 {
        return Err(Error::invalid(format!(
            "spin must be a positive multiple of 1/2, got {s}"
        )));
    }
    let twice_s = twice as usize;
    let dim = twice_s + 1;

    let mut sz = DMatrix::zeros(dim, dim);
    let mut sp = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let twice_m = twice_m_at(twice_s, i);
        sz[(i, i)] = twice_m as f64 / 2.0;
        if i + 1 < dim {
            // S+|m> lands one slot up in the ascending basis.
            sp[(i + 1, i)] = ladder(twice_s, twice_m);
        }
    }
    let sm = sp.transpose();
    let sx = (&sp + &sm) * 0.5;
    let sy_imag = (&sm - &sp) * 0.5;

    Ok(SpinOperatorSet {
        twice_s,
        sx,
        sy_imag,
        sz,
        sp,
        sm,
    })
}

pub(crate) fn twice_m_at(twice_s: usize, pos: usize) -> i64 {
    2 * pos as i64 - twice_s as i64
}

/// `√(S(S+1) − m(m+1))`, the `S+` element from `m` to `m+1`.
pub(crate) fn ladder(twice_s: usize, twice_m: i64) -> f64 {
    let ts = twice_s as f64;
    let tm = twice_m as f64;
    // 4·[S(S+1) − m(m+1)] = ts(ts+2) − tm(tm+2)
    (0.25 * (ts * (ts + 2.0) - tm * (tm + 2.0))).max(0.0).sqrt()
}

/// `<m|S_x²|m> = (S(S+1) − m²)/2`.
pub(crate) fn sx2_diagonal(twice_s: usize, twice_m: i64) -> f64 {
    let ts = twice_s as f64;
    let tm = twice_m as f64;
    (ts * (ts + 2.0) - tm * tm) / 8.0
}

/// `<m+2|S_x²|m> = ¼ √(S(S+1) − m(m+1)) √(S(S+1) − (m+1)(m+2))`.
pub(crate) fn sx2_raise_by_two(twice_s: usize, twice_m: i64) -> f64 {
    0.25 * ladder(twice_s, twice_m) * ladder(twice_s, twice_m + 2)
}
