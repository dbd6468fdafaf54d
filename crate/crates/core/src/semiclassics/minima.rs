use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{energy_gradient, energy_surface, PhasePoint};
use crate::{Error, ModelParams, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Minimum,
    Saddle,
    Maximum,
    /// Some Hessian direction is flat (within finite-difference noise).
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPoint {
    pub point: PhasePoint,
    pub energy: f64,
    pub gradient_norm: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone)]
pub struct MinimaSettings {
    pub seed: u64,
    pub stationarity_tol: f64,
    pub hessian_step: f64,
    pub max_iterations: usize,
}

impl Default for MinimaSettings {
    fn default() -> Self {
        Self {
            seed: 17,
            stationarity_tol: 1e-10,
            hessian_step: 1e-4,
            max_iterations: 10_000,
        }
    }
}

const THETA_STARTS: usize = 3;
const PHI_STARTS: usize = 4;
const START_JITTER: f64 = 0.15;
const SAME_POINT: f64 = 1e-6;

pub fn find_minima(p: &ModelParams) -> Result<Vec<StationaryPoint>> {
    find_minima_with(p, &MinimaSettings::default())
}

/// Multi-start BFGS descent from a jittered 3×4 `(θ, φ)` grid with the
/// field at `x = y = 0`. Returns the distinct stationary points whose
/// Hessian has no negative direction: true minima, plus flat ones
/// classified [`Classification::Degenerate`].
pub fn find_minima_with(
    p: &ModelParams,
    settings: &MinimaSettings,
) -> Result<Vec<StationaryPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut found: Vec<StationaryPoint> = Vec::new();
    let mut best_gradient = f64::INFINITY;

    for i in 0..THETA_STARTS {
        for j in 0..PHI_STARTS {
            let theta = PI * (i as f64 + 0.5) / THETA_STARTS as f64
                + rng.gen_range(-START_JITTER..START_JITTER);
            let phi = 2.0 * PI * (j as f64 + 0.5) / PHI_STARTS as f64
                + rng.gen_range(-START_JITTER..START_JITTER);
            let start = PhasePoint::new(0.0, 0.0, theta, phi);
            let (end, grad_norm) = descend(p, start, settings);
            best_gradient = best_gradient.min(grad_norm);
            if grad_norm >= settings.stationarity_tol {
                continue;
            }
            let mut point = end.canonical();
            // report φ just below 2π as the equivalent angle just below 0
            if 2.0 * PI - point.phi < SAME_POINT {
                point.phi -= 2.0 * PI;
            }
            let (classification, has_negative) = classify(p, &point, settings.hessian_step);
            if has_negative || found.iter().any(|f| same_point(&f.point, &point)) {
                continue;
            }
            found.push(StationaryPoint {
                point,
                energy: energy_surface(p, &point),
                gradient_norm: grad_norm,
                classification,
            });
        }
    }

    if !(best_gradient < settings.stationarity_tol) {
        return Err(Error::NoStationaryPoint { best_gradient });
    }
    // quantized so round-off in one angle cannot reorder points that share it
    let key = |s: &StationaryPoint| {
        let q = |a: f64| (a / SAME_POINT).round() as i64;
        (q(s.point.theta), q(s.point.phi))
    };
    found.sort_by(|a, b| key(a).cmp(&key(b)).then(a.point.x.total_cmp(&b.point.x)));
    Ok(found)
}

fn same_point(a: &PhasePoint, b: &PhasePoint) -> bool {
    let (da, db) = (a.direction(), b.direction());
    let angular = da
        .iter()
        .zip(&db)
        .map(|(p, q)| (p - q).powi(2))
        .sum::<f64>()
        .sqrt();
    (a.x - b.x).abs() < SAME_POINT && (a.y - b.y).abs() < SAME_POINT && angular < SAME_POINT
}

fn norm(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with a backtracking line search. Returns the end point and its gradient norm.
fn descend(p: &ModelParams, start: PhasePoint, settings: &MinimaSettings) -> (PhasePoint, f64) {
    let f = |x: &[f64; 4]| energy_surface(p, &PhasePoint::from_array(*x));
    let grad = |x: &[f64; 4]| energy_gradient(p, &PhasePoint::from_array(*x));

    let mut x = start.to_array();
    let mut fx = f(&x);
    let mut gx = grad(&x);
    let mut inv_h = identity4();

    for _ in 0..settings.max_iterations {
        let gnorm = norm(&gx);
        if gnorm < settings.stationarity_tol {
            break;
        }
        let mut dir = mat_vec(&inv_h, &gx).map(|v| -v);
        let mut slope = dot(&gx, &dir);
        if !(slope < 0.0) {
            inv_h = identity4();
            dir = gx.map(|v| -v);
            slope = -gnorm * gnorm;
        }

        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-16 {
            let trial: [f64; 4] = std::array::from_fn(|i| x[i] + step * dir[i]);
            let ft = f(&trial);
            let gt = grad(&trial);
            let armijo = ft <= fx + 1e-4 * step * slope;
            // Near convergence energy differences drown in rounding; fall back on the gradient.
            let flat = ft <= fx + 1e-13 * fx.abs().max(1.0) && norm(&gt) < gnorm;
            if armijo || flat {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            break;
        };

        let s: [f64; 4] = std::array::from_fn(|i| xn[i] - x[i]);
        let y: [f64; 4] = std::array::from_fn(|i| gn[i] - gx[i]);
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            bfgs_update(&mut inv_h, &s, &y, sy);
        }
        x = xn;
        fx = fn_;
        gx = gn;
    }
    (PhasePoint::from_array(x), norm(&gx))
}

type Mat4 = [[f64; 4]; 4];

fn identity4() -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

fn mat_vec(m: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| dot(&m[i], v))
}

/// `H⁺ = (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(inv_h: &mut Mat4, s: &[f64; 4], y: &[f64; 4], sy: f64) {
    let rho = 1.0 / sy;
    let hy = mat_vec(inv_h, y);
    let yhy = dot(y, &hy);
    for i in 0..4 {
        for j in 0..4 {
            inv_h[i][j] +=
                -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

type Chart = Box<dyn Fn([f64; 4]) -> PhasePoint>;

/// Central-difference Hessian of the energy. Near a pole the angles are
/// replaced by tangent-plane coordinates `(a, b)` with geodesic distance
/// `√(a² + b²)` from the pole, where `φ` carries no information.
fn classify(p: &ModelParams, pt: &PhasePoint, h: f64) -> (Classification, bool) {
    let near_pole = pt.theta.sin().abs() < 1e-3;
    let north = pt.theta < PI / 2.0;
    let (base, chart): ([f64; 4], Chart) = if near_pole {
        let offset = if north { pt.theta } else { PI - pt.theta };
        let (sp, cp) = pt.phi.sin_cos();
        (
            [pt.x, pt.y, offset * cp, offset * sp],
            Box::new(move |c: [f64; 4]| {
                let r = c[2].hypot(c[3]);
                let theta = if north { r } else { PI - r };
                PhasePoint::new(c[0], c[1], theta, c[3].atan2(c[2]))
            }),
        )
    } else {
        (pt.to_array(), Box::new(PhasePoint::from_array))
    };
    let f = |x: [f64; 4]| energy_surface(p, &chart(x));
    let shifted = |a: usize, da: f64, b: usize, db: f64| {
        let mut x = base;
        x[a] += da;
        x[b] += db;
        f(x)
    };
    let n = 4;
    let hess = DMatrix::from_fn(n, n, |a, b| {
        if a == b {
            (shifted(a, h, a, 0.0) - 2.0 * f(base) + shifted(a, -h, a, 0.0)) / (h * h)
        } else {
            (shifted(a, h, b, h) - shifted(a, h, b, -h) - shifted(a, -h, b, h)
                + shifted(a, -h, b, -h))
                / (4.0 * h * h)
        }
    });
    let eig = SymmetricEigen::new(hess).eigenvalues;
    let scale = eig.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
    let thr = 1e-5 * scale;
    let positive = eig.iter().filter(|&&e| e > thr).count();
    let negative = eig.iter().filter(|&&e| e < -thr).count();
    let class = if positive == n {
        Classification::Minimum
    } else if negative == n {
        Classification::Maximum
    } else if positive > 0 && negative > 0 {
        Classification::Saddle
    } else {
        Classification::Degenerate
    };
    (class, negative > 0)
}
