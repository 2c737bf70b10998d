//! Exact second quantization on a truncated set of momentum modes.
//!
//! Every mode is a pair `(k, σ)`. Modes are ordered spin-major (↑ before ↓) and then
//! lexicographically in the integer index of `k`; bit `i` of an occupation bitstring is
//! the occupation of mode `i`, and all fermionic signs are Jordan-Wigner signs with
//! respect to this order. Operators are assembled as sparse complex matrices on an
//! occupation-number basis (the full Fock space of the mode set, or a sector of it).
//!
//! Interaction quadruples with any mode outside the set are dropped; identities are
//! always checked between objects built on the same mode set.

pub mod basis;
pub mod bogoliubov;
pub mod boson;
pub mod checks;
pub mod eigen;
pub mod hamiltonian;
pub mod io;
pub mod modes;
pub mod operator;
pub mod particle_hole;
pub mod printed;
pub mod wick;

pub use basis::{FockBasis, MomentumBlock, Sector};
pub use bogoliubov::BogoliubovTransform;
pub use boson::{CutoffKind, CutoffPair};
pub use hamiltonian::PairKernel;
pub use modes::{Mode, ModeSet};
pub use operator::{FermiOp, SparseOperator, Term};
pub use wick::{Decomposition, DecompositionOptions, Part, SpinFilter};

pub use num_complex::Complex64;
