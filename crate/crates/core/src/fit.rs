use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `y = prefactor · x^exponent` in log-log coordinates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Number of points that entered the fit.
    pub points: usize,
    /// Number of points discarded because `|y|` was zero within tolerance.
    pub excluded: usize,
}

/// Fits `|y| ∝ x^p`. Points with `|y| ≤ zero_tol` are excluded and counted; fewer than two
/// remaining points is a degenerate fit.
pub fn power_law(xs: &[f64], ys: &[f64], zero_tol: f64) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidInput("fit arrays differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && y.abs() > zero_tol)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    let excluded = xs.len() - pts.len();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} of {} points are zero within tolerance",
            excluded,
            xs.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let exponent = sxy / sxx;
    Ok(PowerLawFit {
        exponent,
        prefactor: (my - exponent * mx).exp(),
        points: pts.len(),
        excluded,
    })
}
