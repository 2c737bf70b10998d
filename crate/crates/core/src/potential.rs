//! Compactly supported, nonnegative radial pair potentials.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::enumerate_shells;
use crate::numerics::{integrate, sinc};

/// Default absolute tolerance of the Fourier quadrature.
pub const DEFAULT_FOURIER_TOL: f64 = 1e-10;

/// A radial potential `V_∞(r)` supported in `r < r0`.
///
/// `Bump` is the C^∞ profile `V0·exp(1 − 1/(1 − (r/r0)²))`, so `V(0) = V0`.
/// `SoftSphere` is the constant `V0` inside `r0`; it is discontinuous at `r0` and is
/// kept because its scattering length and transform have closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialPotential {
    SoftSphere { v0: f64, r0: f64 },
    Bump { v0: f64, r0: f64 },
}

impl RadialPotential {
    pub fn validate(&self) -> Result<()> {
        let (v0, r0) = self.params();
        if !(v0 >= 0.0 && v0.is_finite()) || !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "potential needs V0 ≥ 0 and R0 > 0 (got V0 = {v0}, R0 = {r0})"
            )));
        }
        Ok(())
    }

    pub fn params(&self) -> (f64, f64) {
        match *self {
            RadialPotential::SoftSphere { v0, r0 } | RadialPotential::Bump { v0, r0 } => (v0, r0),
        }
    }

    pub fn support(&self) -> f64 {
        self.params().1
    }

    pub fn strength(&self) -> f64 {
        self.params().0
    }

    pub fn is_zero(&self) -> bool {
        self.strength() == 0.0
    }

    /// `V(r)`; zero for `r ≥ r0`.
    pub fn evaluate(&self, r: f64) -> f64 {
        if r >= self.support() {
            0.0
        } else {
            self.interior(r)
        }
    }

    /// The inner closed form continued up to and including `r0`, i.e. the left limit at the
    /// support edge. Radial integrators use this so the last step inside the support does
    /// not see the jump of the soft sphere.
    pub fn interior(&self, r: f64) -> f64 {
        match *self {
            RadialPotential::SoftSphere { v0, .. } => v0,
            RadialPotential::Bump { v0, r0 } => {
                let t = r / r0;
                let d = 1.0 - t * t;
                if d <= 0.0 {
                    0.0
                } else {
                    v0 * (1.0 - 1.0 / d).exp()
                }
            }
        }
    }

    /// Largest value of `V`; both kinds peak at the origin.
    pub fn max_value(&self) -> f64 {
        self.strength()
    }
}

/// Continuum Fourier transform `V̂(p) = 4π ∫ r² V(r) sin(pr)/(pr) dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierPotential {
    pub source: RadialPotential,
    pub tol: f64,
}

impl FourierPotential {
    pub fn new(source: RadialPotential) -> Self {
        FourierPotential {
            source,
            tol: DEFAULT_FOURIER_TOL,
        }
    }

    pub fn with_tolerance(source: RadialPotential, tol: f64) -> Self {
        FourierPotential { source, tol }
    }

    /// `V̂(p)` for `p = |p| ≥ 0`.
    pub fn at(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) {
            return Err(Error::InvalidInput(format!("|p| must be ≥ 0, got {p}")));
        }
        if self.source.is_zero() {
            return Ok(0.0);
        }
        let pot = self.source;
        let q = integrate(
            |r| 4.0 * PI * r * r * pot.interior(r) * sinc(p * r),
            0.0,
            pot.support(),
            self.tol,
        )?;
        Ok(q.value)
    }

    /// `V̂(0) = ∫ V`.
    pub fn at_zero(&self) -> Result<f64> {
        self.at(0.0)
    }

    pub fn at_vector(&self, p: [f64; 3]) -> Result<f64> {
        self.at((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
    }

    /// `V̂` at lattice momentum with integer squared index `m = |n|²` on a box of side `l`.
    pub fn at_lattice(&self, l: f64, m: i64) -> Result<f64> {
        self.at(2.0 * PI / l * (m as f64).sqrt())
    }
}

/// Torus potential `V(x) = L⁻³ Σ_{|p| ≤ pcut} V̂(p) e^{ip·x}` for `p ∈ (2π/L)ℤ³`.
#[derive(Debug, Clone)]
pub struct TorusKernel {
    pub l: f64,
    pub pcut: f64,
    /// Included modes `(n, V̂(p))`.
    pub modes: Vec<([i32; 3], f64)>,
    /// `L⁻³ Σ |V̂(p)|` over `pcut < |p| ≤ 2·pcut`.
    pub tail_estimate: f64,
}

/// Periodizes `V_∞` on `Λ_L` by truncating its Fourier series at `pcut`. The tail
/// estimate is the same sum over the next dyadic shell of momenta; exceeding `tol` is an
/// error.
pub fn periodize(fourier: &FourierPotential, l: f64, pcut: f64, tol: f64) -> Result<TorusKernel> {
    if !(l > 0.0) || !(pcut >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "periodize needs L > 0 and pcut ≥ 0 (got {l}, {pcut})"
        )));
    }
    let shells = enumerate_shells(l, 2.0 * pcut, crate::lattice::DEFAULT_POINT_LIMIT)?;
    let vol = l.powi(3);
    let mut modes = Vec::new();
    let mut tail = 0.0;
    for shell in &shells {
        let v = fourier.at(shell.ksq.sqrt())?;
        if shell.ksq.sqrt() <= pcut {
            modes.extend(shell.momenta.iter().map(|m| (m.n, v)));
        } else {
            tail += v.abs() * shell.momenta.len() as f64 / vol;
        }
    }
    if tail > tol {
        return Err(Error::CutoffTooSmall { tail, tol });
    }
    Ok(TorusKernel {
        l,
        pcut,
        modes,
        tail_estimate: tail,
    })
}

impl TorusKernel {
    pub fn evaluate(&self, x: [f64; 3]) -> f64 {
        let s = 2.0 * PI / self.l;
        let sum: f64 = self
            .modes
            .iter()
            .map(|(n, v)| {
                let phase = s * (n[0] as f64 * x[0] + n[1] as f64 * x[1] + n[2] as f64 * x[2]);
                v * phase.cos()
            })
            .sum();
        sum / self.l.powi(3)
    }
}
