//! `T_λ = exp(λ(B − B*))` via the spectral decomposition of the Hermitian matrix
//! `i(B − B*)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::operator::{inner, SparseOperator};

#[derive(Debug, Clone)]
pub struct BogoliubovTransform {
    generator: SparseOperator,
    vecs: DMatrix<Complex64>,
    vals: DVector<f64>,
}

impl BogoliubovTransform {
    pub fn new(b: &SparseOperator) -> Result<Self> {
        if b.rows() != b.cols() {
            return Err(Error::InvalidInput("B must be square".into()));
        }
        let generator = b.sub(&b.adjoint());
        let herm = generator.to_dense() * Complex64::new(0.0, 1.0);
        let norm = herm.norm();
        let eig = nalgebra::SymmetricEigen::try_new(herm, 1e-15, 100_000).ok_or(Error::Exponential { norm })?;
        Ok(BogoliubovTransform {
            generator,
            vecs: eig.eigenvectors,
            vals: eig.eigenvalues,
        })
    }

    pub fn dim(&self) -> usize {
        self.vals.len()
    }

    /// `G = B − B*`.
    pub fn generator(&self) -> &SparseOperator {
        &self.generator
    }

    /// `T_λ = V e^{−iλD} V*` where `iG = V D V*`.
    pub fn matrix(&self, lambda: f64) -> DMatrix<Complex64> {
        let phases = DVector::from_iterator(
            self.dim(),
            self.vals.iter().map(|&d| Complex64::from_polar(1.0, -lambda * d)),
        );
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |r, c| self.vecs[(r, c)] * phases[c]);
        scaled * self.vecs.adjoint()
    }

    /// `T_λ ψ`.
    pub fn apply(&self, lambda: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let v = DVector::from_column_slice(psi);
        let mut c = self.vecs.adjoint() * v;
        for (x, &d) in c.iter_mut().zip(self.vals.iter()) {
            *x *= Complex64::from_polar(1.0, -lambda * d);
        }
        (&self.vecs * c).iter().copied().collect()
    }

    /// `T*_λ ψ = T_{−λ} ψ`.
    pub fn apply_adjoint(&self, lambda: f64, psi: &[Complex64]) -> Vec<Complex64> {
        self.apply(-lambda, psi)
    }

    /// `max |T_λ T*_λ − I|`.
    pub fn unitarity_residual(&self, lambda: f64) -> f64 {
        let t = self.matrix(lambda);
        let p = &t * t.adjoint() - DMatrix::identity(self.dim(), self.dim());
        p.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |T_a T_b − T_{a+b}|`.
    pub fn group_residual(&self, a: f64, b: f64) -> f64 {
        let d = self.matrix(a) * self.matrix(b) - self.matrix(a + b);
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Central difference of `f(λ) = ⟨T*_λψ, A T*_λψ⟩` against the exact derivative
/// `⟨φ, [B − B*, A] φ⟩`, `φ = T*_λψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuhamelCheck {
    pub lambda: f64,
    pub h: f64,
    pub finite_difference: f64,
    pub exact: f64,
    pub residual: f64,
    /// Residual against `⟨φ, [A, B − B*] φ⟩`, the opposite sign convention.
    pub opposite_sign_residual: f64,
}

pub fn expectation_along(t: &BogoliubovTransform, a: &SparseOperator, psi: &[Complex64], lambda: f64) -> f64 {
    let phi = t.apply_adjoint(lambda, psi);
    inner(&phi, &a.matvec(&phi)).re
}

pub fn duhamel_check(
    t: &BogoliubovTransform,
    a: &SparseOperator,
    psi: &[Complex64],
    lambda: f64,
    h: f64,
) -> DuhamelCheck {
    let fd = (expectation_along(t, a, psi, lambda + h) - expectation_along(t, a, psi, lambda - h)) / (2.0 * h);
    let phi = t.apply_adjoint(lambda, psi);
    let exact = t.generator().commutator(a).expectation(&phi).re;
    DuhamelCheck {
        lambda,
        h,
        finite_difference: fd,
        exact,
        residual: (fd - exact).abs(),
        opposite_sign_residual: (fd + exact).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::{FockBasis, Sector};
    use crate::fock::boson::{pair_terms, CutoffPair};
    use crate::fock::modes::ModeSet;
    use crate::fock::operator::build;
    use rand::{Rng, SeedableRng};

    fn setup() -> (FockBasis, SparseOperator) {
        let m = ModeSet::with_extra(
            3.0,
            1,
            &[[1, 0, 0], [0, 1, 0], [1, 1, 0]],
            1,
            &[[-1, 0, 0], [0, -1, 0], [-1, -1, 0]],
            16,
        )
        .unwrap();
        let ph = FockBasis::build(&m, Sector::ParticleHole { up: 0, down: 0 }).unwrap();
        let cut = CutoffPair::indicator(&m);
        let b = build(
            &ph,
            &ph,
            &pair_terms(&m, &cut, &|p| 20.0 / (1.0 + (p[0] * p[0] + p[1] * p[1]) as f64)),
        )
        .0;
        (ph, b)
    }

    #[test]
    fn unitary_group() {
        let (_, b) = setup();
        let t = BogoliubovTransform::new(&b).unwrap();
        assert!(t.unitarity_residual(0.7) < 1e-12);
        assert!(t.group_residual(0.3, 0.45) < 1e-10);
        let id = t.matrix(0.0) - DMatrix::identity(t.dim(), t.dim());
        assert!(id.iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn duhamel_second_order() {
        let (ph, b) = setup();
        let t = BogoliubovTransform::new(&b).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut psi: Vec<Complex64> = (0..ph.dim())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let n = crate::fock::operator::norm(&psi);
        psi.iter_mut().for_each(|z| *z /= n);
        let excitations = crate::fock::hamiltonian::excitation_number(&ph);
        let r1 = duhamel_check(&t, &excitations, &psi, 0.5, 1e-2);
        let r2 = duhamel_check(&t, &excitations, &psi, 0.5, 5e-3);
        assert!(r1.exact.abs() > 1e-3);
        let ratio = r1.residual / r2.residual;
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
        assert!(r1.opposite_sign_residual > 100.0 * r1.residual);
        let id = SparseOperator::identity(ph.dim());
        assert!(duhamel_check(&t, &id, &psi, 0.2, 1e-4).residual < 1e-10);
    }
}
