//! Momentum lattice `(2π/L)ℤ³` and completely filled Fermi balls.
//!
//! Momenta are stored as integer index triples `n`; the physical momentum `k = (2π/L)·n`
//! is computed on demand, so shell membership is decided on the exact integer `|n|²`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default ceiling on the number of lattice points a single enumeration may produce.
pub const DEFAULT_POINT_LIMIT: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// A lattice momentum `k = (2π/L)·n` on the box of side `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Momentum {
    pub n: [i32; 3],
    pub l: f64,
}

impl Momentum {
    pub fn new(n: [i32; 3], l: f64) -> Self {
        Momentum { n, l }
    }

    /// Integer squared norm `|n|²`.
    pub fn nsq(&self) -> i64 {
        self.n.iter().map(|&c| (c as i64) * (c as i64)).sum()
    }

    pub fn k(&self) -> [f64; 3] {
        let s = 2.0 * PI / self.l;
        [s * self.n[0] as f64, s * self.n[1] as f64, s * self.n[2] as f64]
    }

    /// `|k|² = (2π/L)²·|n|²`.
    pub fn ksq(&self) -> f64 {
        let s = 2.0 * PI / self.l;
        s * s * self.nsq() as f64
    }

    pub fn norm(&self) -> f64 {
        self.ksq().sqrt()
    }
}

/// All lattice momenta sharing one value of `|n|²`, sorted lexicographically by `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shell {
    pub nsq: i64,
    pub ksq: f64,
    pub momenta: Vec<Momentum>,
}

/// Enumerates every lattice momentum with `|k| ≤ kmax`, grouped into shells of equal
/// `|k|²` in ascending order.
pub fn enumerate_shells(l: f64, kmax: f64, point_limit: usize) -> Result<Vec<Shell>> {
    if !(l > 0.0) || !(kmax >= 0.0) || !kmax.is_finite() {
        return Err(Error::InvalidInput(format!(
            "enumerate_shells needs L > 0 and kmax ≥ 0 (got L = {l}, kmax = {kmax})"
        )));
    }
    let nmax_real = kmax * l / (2.0 * PI);
    // integer bound on |n|², with a relative slack against rounding in kmax·L/2π
    let nsq_max = (nmax_real * nmax_real * (1.0 + 1e-12)).floor() as i64;
    let r = (nsq_max as f64).sqrt().floor() as i32;
    let side = 2 * r as usize + 1;
    let estimate = (4.0 / 3.0 * PI * (r as f64 + 1.0).powi(3)) as usize;
    if estimate > point_limit.saturating_mul(2) || side.pow(3) > point_limit.saturating_mul(8) {
        return Err(Error::Capacity {
            what: "lattice points",
            requested: estimate,
            limit: point_limit,
        });
    }
    let mut pts: Vec<[i32; 3]> = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                let s = (x as i64).pow(2) + (y as i64).pow(2) + (z as i64).pow(2);
                if s <= nsq_max {
                    pts.push([x, y, z]);
                }
            }
        }
    }
    if pts.len() > point_limit {
        return Err(Error::Capacity {
            what: "lattice points",
            requested: pts.len(),
            limit: point_limit,
        });
    }
    pts.sort_by_key(|n| (nsq_of(n), *n));
    let mut shells: Vec<Shell> = Vec::new();
    for n in pts {
        let m = Momentum::new(n, l);
        match shells.last_mut() {
            Some(s) if s.nsq == m.nsq() => s.momenta.push(m),
            _ => shells.push(Shell {
                nsq: m.nsq(),
                ksq: m.ksq(),
                momenta: vec![m],
            }),
        }
    }
    Ok(shells)
}

fn nsq_of(n: &[i32; 3]) -> i64 {
    n.iter().map(|&c| (c as i64) * (c as i64)).sum()
}

/// A completely filled Fermi ball of one spin species.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FermiBall {
    pub spin: Spin,
    pub l: f64,
    /// Occupied momenta ordered by `(|n|², n)`.
    pub momenta: Vec<Momentum>,
    /// Largest occupied `|k|`.
    pub kf: f64,
    /// Largest occupied `|n|²`.
    pub nsq_max: i64,
}

impl FermiBall {
    pub fn n(&self) -> usize {
        self.momenta.len()
    }

    pub fn density(&self) -> f64 {
        self.n() as f64 / self.l.powi(3)
    }

    pub fn contains(&self, n: [i32; 3]) -> bool {
        nsq_of(&n) <= self.nsq_max
    }

    pub fn kinetic_sum(&self) -> f64 {
        let s = 2.0 * PI / self.l;
        let isum: i64 = self.momenta.iter().map(Momentum::nsq).sum();
        s * s * isum as f64
    }
}

fn shells_for_count(l: f64, n: usize) -> Result<Vec<Shell>> {
    // radius in lattice units comfortably past the N-th point
    let r = (3.0 * n as f64 / (4.0 * PI)).cbrt() + 2.0;
    enumerate_shells(l, r * 2.0 * PI / l, DEFAULT_POINT_LIMIT)
}

/// Builds the filled Fermi ball with exactly `n` momenta.
///
/// Fails with [`Error::IncompleteShell`] when `n` ends strictly inside a degenerate shell.
pub fn fermi_ball(l: f64, n: usize, spin: Spin) -> Result<FermiBall> {
    if n == 0 {
        return Err(Error::InvalidInput("a Fermi ball needs N ≥ 1".into()));
    }
    if !(l > 0.0) {
        return Err(Error::InvalidInput(format!("box side must be positive, got {l}")));
    }
    let shells = shells_for_count(l, n)?;
    let mut momenta = Vec::with_capacity(n);
    let mut nsq_max = 0;
    for shell in &shells {
        if momenta.len() == n {
            break;
        }
        let below = momenta.len();
        let above = below + shell.momenta.len();
        if above > n {
            return Err(Error::IncompleteShell { n, below, above });
        }
        momenta.extend_from_slice(&shell.momenta);
        nsq_max = shell.nsq;
    }
    let kf = momenta.last().map(Momentum::norm).unwrap_or(0.0);
    Ok(FermiBall {
        spin,
        l,
        momenta,
        kf,
        nsq_max,
    })
}

/// Largest admissible (filled-shell) count not exceeding `n`, if any.
pub fn admissible_below(l: f64, n: usize) -> Result<Option<usize>> {
    Ok(admissible_densities(l, n)?.last().map(|&(c, _)| c))
}

/// Continuum Fermi momentum `(6π²ρ)^{1/3}` of one spin species.
pub fn ideal_fermi_momentum(rho: f64) -> f64 {
    (6.0 * PI * PI).cbrt() * rho.cbrt()
}

/// Every filled-shell count `N ≤ nmax` with its density `N/L³`, ascending.
pub fn admissible_densities(l: f64, nmax: usize) -> Result<Vec<(usize, f64)>> {
    if nmax == 0 {
        return Ok(Vec::new());
    }
    let shells = shells_for_count(l, nmax)?;
    let vol = l.powi(3);
    let mut out = Vec::new();
    let mut count = 0usize;
    for s in shells {
        count += s.momenta.len();
        if count > nmax {
            break;
        }
        out.push((count, count as f64 / vol));
    }
    Ok(out)
}

/// The 48 signed axis permutations of the cubic point group acting on index triples.
pub fn cubic_group() -> Vec<[[i32; 3]; 3]> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for p in perms {
        for signs in 0..8 {
            let mut m = [[0; 3]; 3];
            for (row, &col) in p.iter().enumerate() {
                m[row][col] = if signs >> row & 1 == 1 { -1 } else { 1 };
            }
            out.push(m);
        }
    }
    out
}

pub fn apply_group(g: &[[i32; 3]; 3], n: [i32; 3]) -> [i32; 3] {
    let mut out = [0; 3];
    for (r, row) in g.iter().enumerate() {
        out[r] = row[0] * n[0] + row[1] * n[1] + row[2] * n[2];
    }
    out
}
