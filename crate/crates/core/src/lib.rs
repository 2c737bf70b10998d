//! Numerical toolkit for the dilute spin-1/2 Fermi gas on a periodic box.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: momentum lattice `(2π/L)ℤ³`, shells and completely filled Fermi balls.
//! - [`potential`]: compactly supported radial potentials, their Fourier transforms and
//!   periodization on the torus.
//! - [`scattering`]: the s-wave zero-energy problem (scattering length) and the Neumann
//!   problem on a ball (`λ_γ`, `φ_γ`, `a_γ`).
//! - [`hf`]: Hartree-Fock energy of the free Fermi gas and its decomposition.
//! - [`asymptotics`]: closed-form energy-density expansions.
//! - [`fock`]: exact second quantization on a truncated mode set: particle-hole
//!   transformation, normal-ordered decomposition, pseudo-bosons and the Bogoliubov
//!   transformation.
//!
//! Units: `ħ = 1`, particle mass `1/2`, so the kinetic energy of momentum `k` is `|k|²`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod fit;
pub mod fock;
pub mod hf;
pub mod lattice;
pub mod numerics;
pub mod potential;
pub mod scattering;

pub use asymptotics::{AsymptoticInput, InteractionDensity};
pub use error::{Error, Result};
pub use fit::PowerLawFit;
pub use fock::{
    BogoliubovTransform, Complex64, CutoffKind, CutoffPair, Decomposition, DecompositionOptions, FockBasis, ModeSet,
    PairKernel, Part, Sector, SparseOperator, SpinFilter,
};
pub use hf::EnergyBreakdown;
pub use lattice::{FermiBall, Momentum, Shell, Spin};
pub use potential::{FourierPotential, RadialPotential, TorusKernel};
pub use scattering::{NeumannConfig, ScatteringSolution};
