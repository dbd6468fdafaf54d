use crate::{Error, Result};

/// Least-squares line through `(N, ln d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// Decay rate per atom (negative when d shrinks with N).
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(usize, f64)>,
}

pub fn splitting_scaling_fit(points: &[(usize, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 points for a scaling fit, got {}",
            points.len()
        )));
    }
    if let Some(&(n, d)) = points.iter().find(|(_, d)| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::invalid(format!(
            "splitting must be positive, got d = {d} at N = {n}"
        )));
    }
    if let Some(&(n, _)) = points.iter().find(|(n, _)| n % 2 != 0) {
        return Err(Error::invalid(format!(
            "scaling fit takes even N only, got {n}"
        )));
    }

    let count = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(n, _)| *n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|(_, d)| d.ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / count;
    let mean_y = ys.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("scaling fit needs at least two distinct N"));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };

    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}
