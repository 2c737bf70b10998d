use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::modes::ModeSet;
use crate::fock::operator::{FermiOp, SparseOperator};

/// The particle-hole transformation `R`: a signed permutation of bitstrings with
/// `R* a_k R = a*_k` on ball modes, `R* a_k R = a_k` elsewhere, and `RΩ = Ψ_FFG`.
///
/// It is the product, in mode order, of the flips `W_j = (a_j + a*_j)(−1)^{N − n_j}`
/// over the ball modes `j`, normalized so that the vacuum goes to `+Ψ_FFG`.
#[derive(Debug, Clone)]
pub struct ParticleHole {
    mode_count: usize,
    mask: u32,
    ball_modes: Vec<usize>,
    normalization: f64,
}

impl ParticleHole {
    /// Builds `R` and verifies the conjugation identity on every bitstring.
    pub fn new(modes: &ModeSet) -> Result<Self> {
        let mask = modes.ball_mask();
        let ball_modes: Vec<usize> = (0..modes.len()).filter(|i| mask & (1 << i) != 0).collect();
        let mut r = ParticleHole {
            mode_count: modes.len(),
            mask,
            ball_modes,
            normalization: 1.0,
        };
        r.normalization = r.raw_sign(0);
        let residual = r.identity_defects();
        if residual > 0 {
            return Err(Error::IdentityViolation {
                residual: residual as f64,
                threshold: 0.0,
            });
        }
        Ok(r)
    }

    fn raw_sign(&self, s: u32) -> f64 {
        let mut state = s;
        let mut sign = 1.0;
        // rightmost factor acts first
        for &j in self.ball_modes.iter().rev() {
            let bit = 1u32 << j;
            if (state & !bit).count_ones() % 2 == 1 {
                sign = -sign;
            }
            if (state & (bit - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            state ^= bit;
        }
        sign
    }

    /// `R|s⟩ = sign(s) |image(s)⟩`.
    pub fn sign(&self, s: u32) -> f64 {
        self.raw_sign(s) * self.normalization
    }

    pub fn image(&self, s: u32) -> u32 {
        s ^ self.mask
    }

    /// `R*|t⟩ = sign(t ⊕ M) |t ⊕ M⟩`.
    pub fn adjoint_sign(&self, t: u32) -> f64 {
        self.sign(t ^ self.mask)
    }

    /// Number of `(mode, bitstring)` pairs violating `R* a R = c`.
    pub fn identity_defects(&self) -> usize {
        let mut bad = 0;
        for s in 0..(1u32 << self.mode_count) {
            for i in 0..self.mode_count {
                let lhs = FermiOp::annihilate(i).apply(self.image(s)).map(|(t, sg)| {
                    let back = t ^ self.mask;
                    (back, self.sign(s) * sg * self.adjoint_sign(t))
                });
                let expected = if self.mask & (1 << i) != 0 {
                    FermiOp::create(i)
                } else {
                    FermiOp::annihilate(i)
                };
                if lhs != expected.apply(s) {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// `R` as a matrix from `from` (particle-hole frame) to `to`.
    pub fn operator(&self, from: &FockBasis, to: &FockBasis) -> Result<SparseOperator> {
        let mut trip = Vec::with_capacity(from.dim());
        for (c, &s) in from.states().iter().enumerate() {
            let r = to
                .index_of(self.image(s))
                .ok_or_else(|| Error::InvalidInput(format!("R maps {s:#b} outside the {:?} sector", to.sector)))?;
            trip.push((r, c, Complex64::new(self.sign(s), 0.0)));
        }
        Ok(SparseOperator::from_triplets(to.dim(), from.dim(), trip))
    }

    /// `R* ψ` for `ψ` on `from`, expressed on `to`.
    pub fn pull(&self, psi: &[Complex64], from: &FockBasis, to: &FockBasis) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); to.dim()];
        for (i, &t) in from.states().iter().enumerate() {
            if psi[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let j = to
                .index_of(t ^ self.mask)
                .ok_or_else(|| Error::InvalidInput(format!("R* maps {t:#b} outside the {:?} sector", to.sector)))?;
            out[j] = psi[i] * self.adjoint_sign(t);
        }
        Ok(out)
    }

    /// `R* A R` on `ph` for an operator `A` on `number`.
    pub fn conjugate(&self, a: &SparseOperator, number: &FockBasis, ph: &FockBasis) -> Result<SparseOperator> {
        let r = self.operator(ph, number)?;
        Ok(r.adjoint().mul(a).mul(&r))
    }

    /// The bitstring of `Ψ_FFG`.
    pub fn fermi_sea(&self) -> u32 {
        self.mask
    }
}
