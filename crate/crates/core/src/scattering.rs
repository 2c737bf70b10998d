//! s-wave scattering: the zero-energy scattering length and the Neumann eigenvalue
//! problem on a ball of radius `ρ^{-γ}`.
//!
//! With `u(r) = r·f(r)` the radial equation `−Δf + ½V f = λ f` becomes
//! `−u'' + ½V u = λ u`, `u(0) = 0`. Inside the support it is integrated with RK4 on a
//! uniform grid; outside the support `V = 0` and the solution is propagated in closed
//! form, which is exact.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{power_law, PowerLawFit};
use crate::numerics::{brent, simpson};
use crate::potential::{FourierPotential, RadialPotential};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeumannConfig {
    /// Minimum number of RK4 steps across the support `[0, R0]`.
    pub inner_steps: usize,
    /// Number of geometrically spaced samples between `R0` and the ball radius.
    pub outer_samples: usize,
    /// Upper end of the eigenvalue search window, in units of the Rayleigh bound
    /// `3V̂(0)/(8πR³)` on the lowest eigenvalue.
    pub window_factor: f64,
    /// Required `|f'(R)|` at the returned eigenvalue.
    pub tol: f64,
}

impl Default for NeumannConfig {
    fn default() -> Self {
        NeumannConfig {
            inner_steps: 10_000,
            outer_samples: 2_000,
            window_factor: 64.0,
            tol: 1e-10,
        }
    }
}

/// Outcome of the Neumann problem on `B_R(0)`.
#[derive(Debug, Clone, Serialize)]
pub struct ScatteringSolution {
    pub gamma: f64,
    pub rho: f64,
    pub radius: f64,
    /// Lowest Neumann eigenvalue `λ_γ`.
    pub lambda: f64,
    /// Radial grid, from 0 to `radius`.
    pub r: Vec<f64>,
    /// Samples of `f = 1 − φ_γ`, normalised so that `f(radius) = 1`.
    pub f: Vec<f64>,
    /// `f'(radius)` at the converged eigenvalue.
    pub boundary_slope: f64,
    /// `a_γ = (1/8π) ∫ V f`.
    pub a_gamma: f64,
    /// Zero-energy scattering length `a`.
    pub a0: f64,
    /// Number of grid points inside the support (prefix of `r`).
    pub inner_len: usize,
}

impl ScatteringSolution {
    /// `φ_γ = 1 − f` on the grid.
    pub fn phi(&self) -> Vec<f64> {
        self.f.iter().map(|f| 1.0 - f).collect()
    }

    /// Radial Fourier transform of `φ_γ` extended by zero outside the ball,
    /// `4π ∫₀^R r² φ(r) sin(pr)/(pr) dr`.
    pub fn phi_hat(&self, p: f64) -> f64 {
        let y: Vec<f64> = self
            .r
            .iter()
            .zip(&self.f)
            .map(|(&r, &f)| 4.0 * PI * r * r * (1.0 - f) * crate::numerics::sinc(p * r))
            .collect();
        simpson(&self.r, &y)
    }
}

struct InnerSolution {
    r: Vec<f64>,
    u: Vec<f64>,
    u_end: f64,
    du_end: f64,
}

fn step_count(pot: &RadialPotential, lambda: f64, min_steps: usize) -> usize {
    let kappa = (0.5 * pot.max_value() + lambda.abs()).sqrt();
    let n = min_steps.max((200.0 * pot.support() * kappa).ceil() as usize);
    n + n % 2
}

/// RK4 for `u'' = (½V − λ) u` on `[0, R0]` from `u(0) = 0, u'(0) = 1`. The solution is
/// rescaled when it grows large; only ratios are meaningful.
fn integrate_inner(pot: &RadialPotential, lambda: f64, min_steps: usize, keep: bool) -> Result<InnerSolution> {
    let r0 = pot.support();
    let n = step_count(pot, lambda, min_steps);
    let h = r0 / n as f64;
    let q = |r: f64| 0.5 * pot.interior(r) - lambda;
    let (mut u, mut du) = (0.0f64, 1.0f64);
    let mut rs = Vec::new();
    let mut us = Vec::new();
    if keep {
        rs.reserve(n + 1);
        us.reserve(n + 1);
        rs.push(0.0);
        us.push(0.0);
    }
    for i in 0..n {
        let r = i as f64 * h;
        let qa = q(r);
        let qm = q(r + 0.5 * h);
        let qb = q(r + h);
        let k1u = du;
        let k1v = qa * u;
        let k2u = du + 0.5 * h * k1v;
        let k2v = qm * (u + 0.5 * h * k1u);
        let k3u = du + 0.5 * h * k2v;
        let k3v = qm * (u + 0.5 * h * k2u);
        let k4u = du + h * k3v;
        let k4v = qb * (u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !u.is_finite() || !du.is_finite() {
            return Err(Error::Integrator(format!("non-finite solution at r = {}", r + h)));
        }
        if u.abs() > 1e150 {
            u *= 1e-150;
            du *= 1e-150;
            us.iter_mut().for_each(|x| *x *= 1e-150);
        }
        if keep {
            rs.push((i + 1) as f64 * h);
            us.push(u);
        }
    }
    if let Some(last) = rs.last_mut() {
        *last = r0;
    }
    Ok(InnerSolution {
        r: rs,
        u: us,
        u_end: u,
        du_end: du,
    })
}

/// Exact propagation of `(u, u')` over a distance `dr` where `V = 0`.
fn free_propagate(u: f64, du: f64, dr: f64, lambda: f64) -> (f64, f64) {
    let x = lambda * dr * dr;
    let (c, s, ms) = if x.abs() < 1e-6 {
        // series in λ: cos(√λ dr), sin(√λ dr)/√λ, √λ sin(√λ dr)
        let c = 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0;
        let s = dr * (1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0);
        let ms = lambda * dr * (1.0 - x / 6.0 + x * x / 120.0);
        (c, s, ms)
    } else if lambda > 0.0 {
        let k = lambda.sqrt();
        ((k * dr).cos(), (k * dr).sin() / k, k * (k * dr).sin())
    } else {
        let k = (-lambda).sqrt();
        ((k * dr).cosh(), (k * dr).sinh() / k, -k * (k * dr).sinh())
    };
    (u * c + du * s, -u * ms + du * c)
}

fn check_radius(pot: &RadialPotential, radius: f64) -> Result<()> {
    pot.validate()?;
    if !(radius > pot.support()) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!(
            "ball radius {radius} must exceed the potential support {}",
            pot.support()
        )));
    }
    Ok(())
}

/// Scale-free Neumann mismatch `(R u' − u)/√(u² + R²u'²)` at the ball boundary; its sign
/// equals the sign of `f'(R)` when `u(R) > 0`.
fn mismatch(pot: &RadialPotential, radius: f64, lambda: f64, steps: usize) -> Result<f64> {
    let inner = integrate_inner(pot, lambda, steps, false)?;
    let (u, du) = free_propagate(inner.u_end, inner.du_end, radius - pot.support(), lambda);
    let num = radius * du - u;
    let den = (u * u + radius * radius * du * du).sqrt();
    Ok(num / den)
}

/// Lowest eigenvalue `λ` and eigenfunction `f` (with `f(R) = 1`, `f'(R) = 0`) of
/// `−Δf + ½V f = λ f` on the ball of radius `radius`.
pub fn solve_neumann(
    pot: &RadialPotential,
    radius: f64,
    cfg: &NeumannConfig,
) -> Result<(f64, Vec<f64>, Vec<f64>, f64)> {
    check_radius(pot, radius)?;
    let lambda = if pot.is_zero() {
        0.0
    } else {
        let vhat0 = FourierPotential::new(*pot).at_zero()?;
        // Rayleigh quotient of f ≡ 1 bounds the ground state from above
        let bound = 3.0 * vhat0 / (8.0 * PI * radius.powi(3));
        let lo = 0.0;
        let f_lo = mismatch(pot, radius, lo, cfg.inner_steps)?;
        let mut hi = 1.01 * bound;
        let max_hi = cfg.window_factor * bound;
        while mismatch(pot, radius, hi, cfg.inner_steps)?.signum() == f_lo.signum() {
            hi *= 2.0;
            if hi > max_hi {
                return Err(Error::NoBracket { lo, hi: max_hi });
            }
        }
        brent(
            |l| mismatch(pot, radius, l, cfg.inner_steps),
            lo,
            hi,
            4.0 * f64::EPSILON * hi,
            200,
        )?
    };
    let (r, f, slope) = eigenfunction(pot, radius, lambda, cfg)?;
    if slope.abs() > cfg.tol {
        return Err(Error::Integrator(format!(
            "boundary slope f'(R) = {slope:e} exceeds tolerance {:e}",
            cfg.tol
        )));
    }
    Ok((lambda, r, f, slope))
}

fn eigenfunction(
    pot: &RadialPotential,
    radius: f64,
    lambda: f64,
    cfg: &NeumannConfig,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let inner = integrate_inner(pot, lambda, cfg.inner_steps, true)?;
    let r0 = pot.support();
    let mut r = inner.r.clone();
    let mut u = inner.u.clone();
    let ratio = radius / r0;
    let mut end = (inner.u_end, inner.du_end);
    for j in 1..=cfg.outer_samples.max(1) {
        let rj = if j == cfg.outer_samples.max(1) {
            radius
        } else {
            r0 * ratio.powf(j as f64 / cfg.outer_samples as f64)
        };
        let (uj, duj) = free_propagate(inner.u_end, inner.du_end, rj - r0, lambda);
        r.push(rj);
        u.push(uj);
        end = (uj, duj);
    }
    let (u_r, du_r) = end;
    if !(u_r > 0.0) {
        return Err(Error::Integrator(format!("u(R) = {u_r:e} is not positive")));
    }
    let norm = radius / u_r;
    // f = u/r·norm with f(0) = u'(0)·norm = norm
    let f: Vec<f64> = r
        .iter()
        .zip(&u)
        .map(|(&ri, &ui)| {
            if ri == 0.0 {
                norm * first_slope(&inner)
            } else {
                ui / ri * norm
            }
        })
        .collect();
    let slope = (radius * du_r - u_r) / (radius * u_r);
    Ok((r, f, slope))
}

// u'(0) relative to the (possibly rescaled) stored samples
fn first_slope(inner: &InnerSolution) -> f64 {
    if inner.u.len() > 1 && inner.r[1] > 0.0 {
        // u ≈ c·r near the origin; c carries the accumulated rescaling
        inner.u[1] / inner.r[1]
    } else {
        1.0
    }
}

/// Zero-energy scattering length: `a = R0 − u(R0)/u'(R0)` for the solution of
/// `−u'' + ½V u = 0`, `u(0) = 0`; beyond the support `u` is affine, `u ∝ r − a`.
pub fn scattering_length(pot: &RadialPotential, min_steps: usize) -> Result<f64> {
    pot.validate()?;
    if pot.is_zero() {
        return Ok(0.0);
    }
    let inner = integrate_inner(pot, 0.0, min_steps, false)?;
    Ok(pot.support() - inner.u_end / inner.du_end)
}

/// `a_γ = (1/8π)·4π ∫ r² V(r) f(r) dr`, on the part of the grid inside the support.
pub fn a_gamma(pot: &RadialPotential, r: &[f64], f: &[f64], inner_len: usize) -> f64 {
    let y: Vec<f64> = r[..inner_len]
        .iter()
        .zip(&f[..inner_len])
        .map(|(&ri, &fi)| ri * ri * pot.interior(ri) * fi)
        .collect();
    0.5 * simpson(&r[..inner_len], &y)
}

/// Full solve at density `rho` with ball radius `rho^{-gamma}`.
pub fn solve(pot: &RadialPotential, gamma: f64, rho: f64, cfg: &NeumannConfig) -> Result<ScatteringSolution> {
    if !(rho > 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need ρ > 0 and γ > 0 (got {rho}, {gamma})"
        )));
    }
    solve_at_radius(pot, rho.powf(-gamma), gamma, rho, cfg)
}

pub fn solve_at_radius(
    pot: &RadialPotential,
    radius: f64,
    gamma: f64,
    rho: f64,
    cfg: &NeumannConfig,
) -> Result<ScatteringSolution> {
    let (lambda, r, f, slope) = solve_neumann(pot, radius, cfg)?;
    let inner_len = step_count(pot, lambda, cfg.inner_steps) + 1;
    let ag = a_gamma(pot, &r, &f, inner_len);
    let a0 = scattering_length(pot, cfg.inner_steps)?;
    Ok(ScatteringSolution {
        gamma,
        rho,
        radius,
        lambda,
        r,
        f,
        boundary_slope: slope,
        a_gamma: ag,
        a0,
        inner_len,
    })
}

fn check_sweep(rhos: &[f64]) -> Result<()> {
    let (lo, hi) = rhos
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    if rhos.len() < 4 || !(lo > 0.0) || hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(
            "scaling fits need at least 4 densities spanning 2 decades".into(),
        ));
    }
    Ok(())
}

/// Fit of `|λ_γ| ∝ ρ^p` over a density sweep. Zero eigenvalues are excluded and a fit
/// with fewer than two nonzero points is degenerate.
pub fn lambda_scaling_fit(pot: &RadialPotential, gamma: f64, rhos: &[f64], cfg: &NeumannConfig) -> Result<PowerLawFit> {
    check_sweep(rhos)?;
    let lambdas = rhos
        .iter()
        .map(|&rho| solve_neumann(pot, rho.powf(-gamma), cfg).map(|s| s.0))
        .collect::<Result<Vec<_>>>()?;
    power_law(rhos, &lambdas, 1e-300)
}

/// Fit of `|a_γ − a| ∝ ρ^p` over a density sweep.
pub fn a_gamma_deviation_fit(
    pot: &RadialPotential,
    gamma: f64,
    rhos: &[f64],
    cfg: &NeumannConfig,
) -> Result<PowerLawFit> {
    check_sweep(rhos)?;
    let dev = rhos
        .iter()
        .map(|&rho| solve(pot, gamma, rho, cfg).map(|s| s.a_gamma - s.a0))
        .collect::<Result<Vec<_>>>()?;
    power_law(rhos, &dev, 1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(v0: f64, r0: f64) -> f64 {
        let kappa = (v0 / 2.0).sqrt();
        r0 * (1.0 - (kappa * r0).tanh() / (kappa * r0))
    }

    #[test]
    fn free_equation_is_trivial() {
        let pot = RadialPotential::Bump { v0: 0.0, r0: 1.0 };
        let (l, _, f, _) = solve_neumann(&pot, 5.0, &NeumannConfig::default()).unwrap();
        assert_eq!(l, 0.0);
        assert!(f.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert_eq!(scattering_length(&pot, 10_000).unwrap(), 0.0);
    }

    #[test]
    fn soft_sphere_scattering_length_matches_tanh_formula() {
        for v0 in [0.1, 1.0, 10.0, 100.0] {
            let pot = RadialPotential::SoftSphere { v0, r0: 1.0 };
            let a = scattering_length(&pot, 10_000).unwrap();
            assert!((a - oracle(v0, 1.0)).abs() < 1e-8, "V0 = {v0}");
        }
    }

    #[test]
    fn hard_limit_approaches_range_from_below() {
        let pot = RadialPotential::SoftSphere { v0: 1e6, r0: 1.0 };
        let a = scattering_length(&pot, 10_000).unwrap();
        assert!(a < 1.0 && a > 0.99);
        assert!((a - oracle(1e6, 1.0)).abs() < 1e-7);
    }

    #[test]
    fn large_ball_recovers_one_minus_a_over_r() {
        let pot = RadialPotential::SoftSphere { v0: 4.0, r0: 1.0 };
        let cfg = NeumannConfig::default();
        let sol = solve_at_radius(&pot, 100.0, 1.0 / 3.0, 1e-6, &cfg).unwrap();
        assert!(sol.lambda > 0.0 && sol.lambda < 1e-4);
        let a = oracle(4.0, 1.0);
        assert!((sol.a_gamma - a).abs() / a < 0.02);
        // outside the support f ≈ c(1 − a/r) with c → 1 as R → ∞
        let idx = sol.r.iter().position(|&r| r > 3.0).unwrap();
        let (r, f) = (sol.r[idx], sol.f[idx]);
        let c = 1.0 / (1.0 - a / 100.0);
        assert!((f - c * (1.0 - a / r)).abs() < 0.02, "{f} vs {}", 1.0 - a / r);
    }

    #[test]
    fn eigenfunction_satisfies_boundary_conditions_and_bounds() {
        let pot = RadialPotential::Bump { v0: 3.0, r0: 1.0 };
        let cfg = NeumannConfig::default();
        let sol = solve_at_radius(&pot, 6.0, 1.0 / 3.0, 6f64.powi(-3), &cfg).unwrap();
        assert!((sol.f.last().unwrap() - 1.0).abs() < 1e-12);
        assert!(sol.boundary_slope.abs() < 1e-10);
        assert!(sol.f.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
        assert!(sol.f[0] > 0.0);
    }

    #[test]
    fn scattering_length_bounded_by_range() {
        for pot in [
            RadialPotential::Bump { v0: 50.0, r0: 0.8 },
            RadialPotential::SoftSphere { v0: 0.3, r0: 2.0 },
        ] {
            let a = scattering_length(&pot, 10_000).unwrap();
            assert!(a >= 0.0 && a <= pot.support());
        }
    }

    #[test]
    fn grid_refinement_moves_lambda_little() {
        let pot = RadialPotential::Bump { v0: 2.0, r0: 1.0 };
        let coarse = NeumannConfig {
            inner_steps: 2_000,
            ..Default::default()
        };
        let fine = NeumannConfig {
            inner_steps: 4_000,
            ..Default::default()
        };
        let l1 = solve_neumann(&pot, 8.0, &coarse).unwrap().0;
        let l2 = solve_neumann(&pot, 8.0, &fine).unwrap().0;
        assert!(
            (l1 - l2).abs() < 10.0 * coarse.tol * l1.max(1e-300).max(1.0),
            "{l1} {l2}"
        );
        assert!(((l1 - l2) / l2).abs() < 1e-9);
    }

    #[test]
    fn doubling_radius_lowers_lambda_and_improves_a_gamma() {
        let pot = RadialPotential::Bump { v0: 2.0, r0: 1.0 };
        let cfg = NeumannConfig::default();
        let mut prev_l = f64::INFINITY;
        let mut devs = Vec::new();
        for k in 0..6 {
            let radius = 2.0 * 2f64.powi(k);
            let s = solve_at_radius(&pot, radius, 1.0 / 3.0, radius.powi(-3), &cfg).unwrap();
            assert!(s.lambda < prev_l);
            prev_l = s.lambda;
            devs.push((s.a_gamma - s.a0).abs());
        }
        for w in devs[1..].windows(2) {
            assert!(w[1] < w[0], "{devs:?}");
        }
    }

    #[test]
    fn radius_inside_support_is_rejected() {
        let pot = RadialPotential::Bump { v0: 1.0, r0: 1.0 };
        assert!(solve_neumann(&pot, 0.5, &NeumannConfig::default()).is_err());
    }

    #[test]
    fn zero_potential_fit_is_degenerate() {
        let pot = RadialPotential::Bump { v0: 0.0, r0: 1.0 };
        let r = lambda_scaling_fit(&pot, 1.0 / 3.0, &[1e-4, 1e-3, 3e-3, 1e-2], &NeumannConfig::default());
        assert!(matches!(r, Err(Error::DegenerateFit(_))));
    }
}
