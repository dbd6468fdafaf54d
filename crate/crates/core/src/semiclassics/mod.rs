//! Coherent-state energy landscape
//!
//! ```text
//! E(x, y, θ, φ) = ω(x² + y²) + 2 S g x cosθ − v S² sin²θ cos²φ
//! ```
//!
//! plus the tunnelling interference factor `|cos(Sπ)|` and the exponential
//! fit of even-N splittings.

mod fit;
mod minima;

pub use fit::{splitting_scaling_fit, ScalingFit};
pub use minima::{find_minima, find_minima_with, Classification, MinimaSettings, StationaryPoint};

use std::f64::consts::PI;

use crate::{Error, ModelParams, Result};

/// Field quadratures `(x, y)` and Bloch angles `(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub phi: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64, theta: f64, phi: f64) -> Self {
        Self { x, y, theta, phi }
    }

    pub(crate) fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.theta, self.phi]
    }

    pub(crate) fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Same physical point with `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
    pub fn canonical(self) -> Self {
        let mut theta = self.theta.rem_euclid(2.0 * PI);
        let mut phi = self.phi;
        if theta > PI {
            theta = 2.0 * PI - theta;
            phi += PI;
        }
        Self {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
            ..self
        }
    }

    /// Unit vector of the spin direction.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

pub fn energy_surface(p: &ModelParams, pt: &PhasePoint) -> f64 {
    let s = p.spin();
    let (st, ct) = pt.theta.sin_cos();
    let cp = pt.phi.cos();
    p.omega() * (pt.x * pt.x + pt.y * pt.y) + 2.0 * s * p.g() * pt.x * ct
        - p.v() * s * s * st * st * cp * cp
}

/// Analytic gradient `∂E/∂(x, y, θ, φ)`.
pub fn energy_gradient(p: &ModelParams, pt: &PhasePoint) -> [f64; 4] {
    let s = p.spin();
    let (w, g, v) = (p.omega(), p.g(), p.v());
    let (st, ct) = pt.theta.sin_cos();
    let (sp, cp) = pt.phi.sin_cos();
    [
        2.0 * w * pt.x + 2.0 * s * g * ct,
        2.0 * w * pt.y,
        -2.0 * s * g * pt.x * st - 2.0 * v * s * s * st * ct * cp * cp,
        2.0 * v * s * s * st * st * cp * sp,
    ]
}

/// `min_{x,y} E = −u S² cos²θ − v S² sin²θ cos²φ`, reached at
/// `x = −S g cosθ/ω`, `y = 0`.
pub fn reduced_surface(p: &ModelParams, theta: f64, phi: f64) -> f64 {
    let s2 = p.spin() * p.spin();
    let (st, ct) = theta.sin_cos();
    let cp = phi.cos();
    -p.u() * s2 * ct * ct - p.v() * s2 * st * st * cp * cp
}

/// `|cos(Nπ/2)|`: 1 for even N, 0 for odd N, without floating trig.
pub fn interference_factor(n_atoms: i64) -> Result<f64> {
    if n_atoms < 1 {
        return Err(Error::invalid(format!(
            "N must be at least 1, got {n_atoms}"
        )));
    }
    Ok(match n_atoms % 4 {
        0 | 2 => 1.0,
        _ => 0.0,
    })
}

/// Evaluate [`reduced_surface`] on a `theta_points × phi_points` grid
/// covering `θ ∈ [0, π]`, `φ ∈ [0, 2π]`. Rows are `(θ, φ, E)`.
pub fn landscape_grid(
    p: &ModelParams,
    theta_points: usize,
    phi_points: usize,
) -> Vec<(f64, f64, f64)> {
    let step = |i: usize, n: usize, span: f64| {
        if n <= 1 {
            0.0
        } else {
            span * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(theta_points * phi_points);
    for i in 0..theta_points {
        let theta = step(i, theta_points, PI);
        for j in 0..phi_points {
            let phi = step(j, phi_points, 2.0 * PI);
            out.push((theta, phi, reduced_surface(p, theta, phi)));
        }
    }
    out
}
