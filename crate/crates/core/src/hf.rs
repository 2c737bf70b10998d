//! Hartree-Fock energy of the free Fermi gas: kinetic, direct and exchange parts.
//!
//! The exchange double sum over a ball depends on `k − k'` only through the integer
//! `|n − n'|²`, so it is computed from an exact integer histogram of pair distances; the
//! transform is then evaluated once per distinct distance and summed in a fixed order.

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::free_density;
use crate::error::{Error, Result};
use crate::lattice::{FermiBall, Spin};
use crate::numerics::pairwise_sum;
use crate::potential::FourierPotential;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub l: f64,
    pub n_up: usize,
    pub n_down: usize,
    pub rho_up: f64,
    pub rho_down: f64,
    pub kinetic: f64,
    pub direct: f64,
    pub exchange: f64,
    pub total: f64,
    /// `total / L³`.
    pub density_total: f64,
    /// `exchange + (L³/2) Σ_σ V̂(0) ρ_σ²`.
    pub taylor_residual: f64,
}

/// Per-volume kinetic and interaction energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HfDensity {
    pub kinetic_density: f64,
    pub interaction_density: f64,
}

fn check_balls(balls: &[FermiBall]) -> Result<f64> {
    let l = balls
        .first()
        .map(|b| b.l)
        .ok_or_else(|| Error::InvalidInput("no Fermi balls given".into()))?;
    if balls.len() > 2 || (balls.len() == 2 && balls[0].spin == balls[1].spin) {
        return Err(Error::InvalidInput("at most one Fermi ball per spin".into()));
    }
    if balls.iter().any(|b| b.l != l) {
        return Err(Error::InvalidInput("Fermi balls live on different boxes".into()));
    }
    Ok(l)
}

fn densities(balls: &[FermiBall]) -> (f64, f64) {
    let mut rho = [0.0; 2];
    for b in balls {
        rho[b.spin.index()] = b.density();
    }
    (rho[0], rho[1])
}

/// `Σ_σ Σ_{k ∈ B_F^σ} |k|²`.
pub fn kinetic_energy(balls: &[FermiBall]) -> f64 {
    balls.iter().map(FermiBall::kinetic_sum).sum()
}

/// `(L³/2) V̂(0) (ρ↑ + ρ↓)²`.
pub fn direct_term(rho_up: f64, rho_down: f64, vhat0: f64, l: f64) -> f64 {
    0.5 * l.powi(3) * vhat0 * (rho_up + rho_down).powi(2)
}

/// Histogram of `|n − n'|²` over all ordered pairs of the ball (diagonal included).
pub fn pair_distance_histogram(ball: &FermiBall) -> Vec<u64> {
    let size = (4 * ball.nsq_max + 1) as usize;
    let ns: Vec<[i32; 3]> = ball.momenta.iter().map(|m| m.n).collect();
    ns.par_iter()
        .fold(
            || vec![0u64; size],
            |mut h, a| {
                for b in &ns {
                    let d: i64 = (0..3).map(|i| ((a[i] - b[i]) as i64).pow(2)).sum();
                    h[d as usize] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        )
}

/// `−(1/2L³) Σ_σ Σ_{k,k' ∈ B_F^σ} V̂(k − k')`.
pub fn exchange_term(balls: &[FermiBall], fourier: &FourierPotential) -> Result<f64> {
    let l = check_balls(balls)?;
    let mut per_spin = Vec::with_capacity(balls.len());
    for ball in balls {
        let hist = pair_distance_histogram(ball);
        let terms = hist
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(m, &c)| Ok(c as f64 * fourier.at_lattice(l, m as i64)?))
            .collect::<Result<Vec<f64>>>()?;
        per_spin.push(pairwise_sum(&terms));
    }
    Ok(-per_spin.iter().sum::<f64>() / (2.0 * l.powi(3)))
}

/// Exchange term plus its leading Taylor approximation `(L³/2) Σ_σ V̂(0) ρ_σ²`.
pub fn taylor_exchange_residual(balls: &[FermiBall], fourier: &FourierPotential) -> Result<f64> {
    let l = check_balls(balls)?;
    let vhat0 = fourier.at_zero()?;
    let (ru, rd) = densities(balls);
    Ok(exchange_term(balls, fourier)? + 0.5 * l.powi(3) * vhat0 * (ru * ru + rd * rd))
}

/// Full Hartree-Fock energy of the filled balls.
pub fn hf_energy(balls: &[FermiBall], fourier: &FourierPotential) -> Result<EnergyBreakdown> {
    let l = check_balls(balls)?;
    let vhat0 = fourier.at_zero()?;
    let (rho_up, rho_down) = densities(balls);
    let count = |s: Spin| balls.iter().filter(|b| b.spin == s).map(FermiBall::n).sum();
    let kinetic = kinetic_energy(balls);
    let direct = direct_term(rho_up, rho_down, vhat0, l);
    let exchange = exchange_term(balls, fourier)?;
    let total = kinetic + direct + exchange;
    Ok(EnergyBreakdown {
        l,
        n_up: count(Spin::Up),
        n_down: count(Spin::Down),
        rho_up,
        rho_down,
        kinetic,
        direct,
        exchange,
        total,
        density_total: total / l.powi(3),
        taylor_residual: exchange + 0.5 * l.powi(3) * vhat0 * (rho_up * rho_up + rho_down * rho_down),
    })
}

pub fn hf_density(b: &EnergyBreakdown) -> HfDensity {
    let vol = b.l.powi(3);
    HfDensity {
        kinetic_density: b.kinetic / vol,
        interaction_density: (b.direct + b.exchange) / vol,
    }
}

/// `kinetic density − (3/5)(6π²)^{2/3} Σ_σ ρ_σ^{5/3}` with the actual ball densities.
pub fn kinetic_density_error(b: &EnergyBreakdown) -> f64 {
    hf_density(b).kinetic_density - free_density(b.rho_up, b.rho_down)
}
