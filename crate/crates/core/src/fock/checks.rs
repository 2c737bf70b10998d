//! Composite checks on small mode sets: each returns the measured quantities so that
//! callers decide on thresholds and reporting.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fock::basis::{FockBasis, Sector};
use crate::fock::bogoliubov::{expectation_along, BogoliubovTransform};
use crate::fock::boson::{max_pair_weight, pseudo_boson, pseudo_boson_terms, vacuum_commutator, CutoffPair};
use crate::fock::eigen::lowest_eigenvalue;
use crate::fock::hamiltonian::{add, hamiltonian, interaction_quadruples, PairKernel, Quadruple};
use crate::fock::modes::ModeSet;
use crate::fock::operator::{build_on, inner, norm, SparseOperator, Term};
use crate::fock::particle_hole::ParticleHole;
use crate::fock::wick::{Decomposition, DecompositionOptions, Part, SpinFilter};
use crate::hf;
use crate::lattice::Spin;
use crate::potential::FourierPotential;

/// Normalized vector with i.i.d. uniform real and imaginary parts.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// The number sector of the filled balls and its particle-hole image.
pub fn sector_pair(modes: &ModeSet) -> Result<(FockBasis, FockBasis)> {
    let (nu, nd) = (modes.ball(Spin::Up).n(), modes.ball(Spin::Down).n());
    Ok((
        FockBasis::build(modes, Sector::Number { up: nu, down: nd })?,
        FockBasis::particle_hole_image(modes, nu, nd)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FermiSeaCheck {
    /// `⟨RΩ, H RΩ⟩` from the Fock matrices.
    pub fock: f64,
    /// Lattice Hartree-Fock energy of the same balls.
    pub hartree_fock: f64,
    /// `E_HF` collected from normal ordering.
    pub normal_ordered: f64,
    pub relative_error: f64,
}

pub fn fermi_sea_energy(modes: &ModeSet, fourier: &FourierPotential) -> Result<FermiSeaCheck> {
    let kernel = PairKernel::fourier(modes, fourier)?;
    let (a, b) = sector_pair(modes)?;
    let h = hamiltonian(modes, &kernel, &a)?.operator;
    let r = ParticleHole::new(modes)?;
    let omega = b.unit(0).expect("vacuum is charge-neutral");
    let sea = r.operator(&b, &a)?.matvec(&omega);
    let fock = h.expectation(&sea).re;
    let e = hf::hf_energy(modes.balls(), fourier)?;
    let d = Decomposition::new(modes, &kernel, DecompositionOptions::default())?;
    Ok(FermiSeaCheck {
        fock,
        hartree_fock: e.total,
        normal_ordered: d.e_hf,
        relative_error: (fock - e.total).abs() / e.total.abs().max(f64::MIN_POSITIVE),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionCheck {
    pub sector_dim: usize,
    pub draws: usize,
    pub dropped_quadruples: usize,
    /// `max |⟨ψ,Hψ⟩ − E_HF − ⟨R*ψ,(H0+X+ΣQ)R*ψ⟩|` over the draws.
    pub max_residual: f64,
    /// `max |R*HR − (E_HF + H0 + X + ΣQ)|` on the particle-hole sector.
    pub operator_residual: f64,
    /// Residual when `ψ = RΩ`.
    pub fermi_sea_residual: f64,
}

pub fn decomposition_identity<R: Rng + ?Sized>(
    modes: &ModeSet,
    kernel: &PairKernel,
    opts: DecompositionOptions,
    draws: usize,
    rng: &mut R,
) -> Result<DecompositionCheck> {
    let (a, b) = sector_pair(modes)?;
    let ham = hamiltonian(modes, kernel, &a)?;
    let r = ParticleHole::new(modes)?;
    let d = Decomposition::new(modes, kernel, opts)?;
    let mut terms: Vec<Term> = d.terms(Part::H0, SpinFilter::All);
    for p in [Part::X, Part::Q1, Part::Q2, Part::Q3, Part::Q4] {
        terms.extend(d.terms(p, SpinFilter::All));
    }
    let rest = build_on(&b, &terms)?;
    let residual = |psi: &[Complex64]| -> Result<f64> {
        let lhs = ham.operator.expectation(psi).re;
        let phi = r.pull(psi, &a, &b)?;
        Ok((lhs - d.e_hf - rest.expectation(&phi).re).abs())
    };
    let mut max_residual: f64 = 0.0;
    for _ in 0..draws {
        max_residual = max_residual.max(residual(&random_state(a.dim(), rng))?);
    }
    let sea = r.operator(&b, &a)?.matvec(&b.unit(0).expect("vacuum"));
    let conj = r.conjugate(&ham.operator, &a, &b)?;
    Ok(DecompositionCheck {
        sector_dim: a.dim(),
        draws,
        dropped_quadruples: ham.dropped,
        max_residual,
        operator_residual: conj.sub(&rest.shift(d.e_hf)).max_abs(),
        fermi_sea_residual: residual(&sea)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscardCheck {
    pub block_dim: usize,
    /// Smallest `V̂(p)` over the momentum transfers of the mode set.
    pub min_kernel: f64,
    /// Lowest eigenvalue of `R*HR − (E_HF + H0 + X + Σ Q̃)` on the neutral block.
    pub min_eigenvalue: f64,
    /// Lowest eigenvalue of the conjugated equal-spin interaction `R* W_σσ R`.
    pub equal_spin_interaction_min: f64,
}

pub fn equal_spin_discard(modes: &ModeSet, kernel: &PairKernel) -> Result<DiscardCheck> {
    let (a, b) = sector_pair(modes)?;
    let h = hamiltonian(modes, kernel, &a)?.operator;
    let r = ParticleHole::new(modes)?;
    let d = Decomposition::new(modes, kernel, DecompositionOptions::default())?;
    let discarded = r.conjugate(&h, &a, &b)?.sub(&d.reduced(&b)?);
    let (quads, _) = interaction_quadruples(modes, kernel)?;
    let same: Vec<Term> = quads.iter().filter(|q| q.same_spin).map(Quadruple::term).collect();
    let w = r.conjugate(&build_on(&a, &same)?, &a, &b)?;
    let min_kernel = (0..=modes.max_distance_sq())
        .map(|m| kernel.at_nsq(m))
        .fold(f64::INFINITY, f64::min);
    Ok(DiscardCheck {
        block_dim: b.dim(),
        min_kernel,
        min_eigenvalue: lowest_eigenvalue(&discarded, 1e-12)?,
        equal_spin_interaction_min: lowest_eigenvalue(&w, 1e-12)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxGroundState {
    pub lhs: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// `|⟨ψ,Hψ⟩ − Σ_σ Σ_{B_F^σ} |k|²|` against `C L³ ρ²`.
pub fn approx_ground_state(psi: &[Complex64], h: &SparseOperator, modes: &ModeSet, c: f64) -> ApproxGroundState {
    let kinetic: f64 = modes.balls().iter().map(|b| b.kinetic_sum()).sum();
    let l3 = modes.l.powi(3);
    let rho = modes.balls().iter().map(|b| b.n()).sum::<usize>() as f64 / l3;
    let lhs = (h.expectation(psi).re - kinetic).abs();
    let bound = c * l3 * rho * rho;
    ApproxGroundState {
        lhs,
        bound,
        satisfied: lhs <= bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VacuumCommutator {
    pub p: [i32; 3],
    pub spin: Spin,
    pub matrix_value: f64,
    pub lattice_count: usize,
}

/// `⟨Ω, [b̂_p, b̂*_p] Ω⟩ = ‖b̂*_p Ω‖² − ‖b̂_p Ω‖²` with indicator cutoffs for every `p`
/// with `|p|² ≤ nsq_max`, next to the direct count of ball momenta `k` with `k + p`
/// outside the ball. Both norms are computed by acting on the empty bitstring.
pub fn vacuum_commutator_sweep(modes: &ModeSet, nsq_max: i64) -> Result<Vec<VacuumCommutator>> {
    let cut = CutoffPair::indicator(modes);
    let r = (nsq_max as f64).sqrt().floor() as i32;
    let norm_sq = |terms: &[Term]| -> f64 {
        let mut image: BTreeMap<u32, f64> = BTreeMap::new();
        for t in terms {
            if let Some((s, sign)) = t.apply(0) {
                *image.entry(s).or_insert(0.0) += sign * t.coeff.re;
            }
        }
        image.values().map(|c| c * c).sum()
    };
    let mut out = Vec::new();
    for spin in Spin::BOTH {
        let ball = modes.ball(spin);
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    let p = [x, y, z];
                    if (x * x + y * y + z * z) as i64 > nsq_max {
                        continue;
                    }
                    let b = pseudo_boson_terms(modes, &cut, p, spin);
                    let adj: Vec<Term> = b.iter().map(Term::adjoint).collect();
                    let value = norm_sq(&adj) - norm_sq(&b);
                    let count = ball
                        .momenta
                        .iter()
                        .filter(|k| {
                            let q = add(k.n, p);
                            !ball.contains(q) && modes.find(q, spin).is_some() && modes.find(k.n, spin).is_some()
                        })
                        .count();
                    out.push(VacuumCommutator {
                        p,
                        spin,
                        matrix_value: value,
                        lattice_count: count,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearBosonicity {
    pub p: [i32; 3],
    pub spin: Spin,
    pub excitations: u32,
    pub vacuum_count: f64,
    /// Spectral norm of `[b̂_p, b̂*_p] − c_p` on states with at most `excitations`
    /// occupied modes.
    pub deviation: f64,
    pub bound: f64,
}

pub fn near_bosonicity(
    modes: &ModeSet,
    cut: &CutoffPair,
    p: [i32; 3],
    spin: Spin,
    excitations: u32,
) -> Result<NearBosonicity> {
    // the commutator conserves particle number, so intermediate states have at most
    // two more occupied modes than the block itself
    let space = FockBasis::build(modes, Sector::Occupied { max: excitations + 2 })?;
    let b = pseudo_boson(modes, &space, cut, p, spin);
    let c = vacuum_commutator(modes, cut, p, spin);
    let dev = b.commutator(&b.adjoint()).shift(-c);
    let idx: Vec<usize> = (0..space.dim())
        .filter(|&i| space.state(i).count_ones() <= excitations)
        .collect();
    let block = dev.block(&idx);
    let eig = nalgebra::SymmetricEigen::new(block);
    let deviation = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(NearBosonicity {
        p,
        spin,
        excitations,
        vacuum_count: c,
        deviation,
        bound: excitations as f64 * max_pair_weight(modes, cut, p, spin).powi(2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationLog {
    pub names: Vec<String>,
    pub lambdas: Vec<f64>,
    /// `values[i][j]`: operator `j` at `lambdas[i]`.
    pub values: Vec<Vec<f64>>,
    pub slack: f64,
    pub bounded: bool,
}

/// `⟨T*_λ φ, A T*_λ φ⟩` across `lambdas`; bounded means every value stays below
/// `10 |value at λ = 0| + slack`.
pub fn propagation_log(
    t: &BogoliubovTransform,
    ops: &[(&str, &SparseOperator)],
    phi: &[Complex64],
    lambdas: &[f64],
    slack: f64,
) -> PropagationLog {
    let values: Vec<Vec<f64>> = lambdas
        .iter()
        .map(|&l| ops.iter().map(|(_, a)| expectation_along(t, a, phi, l)).collect())
        .collect();
    let start: Vec<f64> = ops.iter().map(|(_, a)| inner(phi, &a.matvec(phi)).re).collect();
    let bounded = values
        .iter()
        .all(|row| row.iter().zip(&start).all(|(v, s)| *v <= 10.0 * s.abs() + slack));
    PropagationLog {
        names: ops.iter().map(|(n, _)| n.to_string()).collect(),
        lambdas: lambdas.to_vec(),
        values,
        slack,
        bounded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::hamiltonian::number_operator;
    use crate::potential::RadialPotential;
    use rand::SeedableRng;

    fn bump() -> FourierPotential {
        FourierPotential::new(RadialPotential::Bump { v0: 2.0, r0: 1.0 })
    }

    #[test]
    fn fermi_sea_matches_hartree_fock() {
        let m = ModeSet::with_extra(4.0, 7, &[], 7, &[], 16).unwrap();
        let c = fermi_sea_energy(&m, &bump()).unwrap();
        assert!(c.relative_error < 1e-12, "{c:?}");
        assert!((c.normal_ordered - c.hartree_fock).abs() < 1e-12 * c.hartree_fock);
    }

    #[test]
    fn decomposition_identity_on_random_states() {
        let m = ModeSet::with_extra(4.0, 1, &[[1, 0, 0], [-1, 0, 0], [0, 1, 0]], 7, &[[1, 1, 0]], 16).unwrap();
        let k = PairKernel::fourier(&m, &bump()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let c = decomposition_identity(&m, &k, DecompositionOptions::default(), 5, &mut rng).unwrap();
        assert!(
            c.max_residual < 1e-12 && c.operator_residual < 1e-12 && c.fermi_sea_residual < 1e-12,
            "{c:?}"
        );
        let bad = decomposition_identity(
            &m,
            &k,
            DecompositionOptions {
                corrupt_exchange_sign: true,
            },
            5,
            &mut rng,
        )
        .unwrap();
        assert!(bad.max_residual > 1e-6);
    }

    #[test]
    fn free_case_reduces_to_kinetic_bookkeeping() {
        let m = ModeSet::with_extra(4.0, 1, &[[1, 0, 0], [0, 1, 0]], 1, &[[0, 0, 1]], 16).unwrap();
        let zero = PairKernel::constant(m.l, m.max_distance_sq(), 0.0);
        let d = Decomposition::new(&m, &zero, DecompositionOptions::default()).unwrap();
        assert_eq!(d.e_hf, 0.0);
        for p in [Part::X, Part::Q1, Part::Q2, Part::Q3, Part::Q4] {
            assert_eq!(d.term_count(p), 0);
        }
        let (a, _) = sector_pair(&m).unwrap();
        let h = hamiltonian(&m, &zero, &a).unwrap().operator;
        let sea = a.unit(ParticleHole::new(&m).unwrap().fermi_sea()).unwrap();
        assert_eq!(approx_ground_state(&sea, &h, &m, 1.0).lhs, 0.0);
    }

    #[test]
    fn equal_spin_interaction_is_positive() {
        let m = ModeSet::with_extra(4.0, 7, &[[1, 1, 0]], 1, &[[1, 0, 0], [-1, 0, 0]], 16).unwrap();
        let k = PairKernel::fourier(&m, &bump()).unwrap();
        let c = equal_spin_discard(&m, &k).unwrap();
        assert!(c.equal_spin_interaction_min > -1e-12, "{c:?}");
        let contact = PairKernel::constant(m.l, m.max_distance_sq(), 1.0);
        // Pauli: equal-spin contact interaction vanishes identically
        assert!(equal_spin_discard(&m, &contact).unwrap().min_eigenvalue.abs() < 1e-12);
    }

    #[test]
    fn vacuum_sweep_and_near_bosonicity() {
        let m = ModeSet::with_extra(5.0, 1, &[[1, 0, 0], [0, 1, 0], [-1, 0, 0]], 7, &[[1, 1, 0]], 16).unwrap();
        for v in vacuum_commutator_sweep(&m, 2).unwrap() {
            assert_eq!(v.matrix_value, v.lattice_count as f64, "{v:?}");
        }
        let cut = CutoffPair::indicator(&m);
        for ex in 0..=2 {
            let nb = near_bosonicity(&m, &cut, [1, 0, 0], Spin::Up, ex).unwrap();
            assert!(nb.deviation <= nb.bound + 1e-12, "{nb:?}");
        }
    }

    #[test]
    fn propagation_is_logged() {
        let m = ModeSet::with_extra(3.0, 1, &[[1, 0, 0]], 1, &[[-1, 0, 0]], 16).unwrap();
        let (_, b) = sector_pair(&m).unwrap();
        let cut = CutoffPair::indicator(&m);
        let bop = crate::fock::operator::build(&b, &b, &crate::fock::boson::pair_terms(&m, &cut, &|_| 1.0)).0;
        let t = BogoliubovTransform::new(&bop).unwrap();
        let n = number_operator(&m, &b, None);
        let omega = b.unit(0).unwrap();
        let log = propagation_log(&t, &[("N", &n)], &omega, &[0.0, 0.5, 1.0], 10.0);
        assert_eq!(log.values.len(), 3);
        assert_eq!(log.values[0][0], 0.0);
        assert!(log.values[2][0] > 0.0 && log.bounded);
    }
}
