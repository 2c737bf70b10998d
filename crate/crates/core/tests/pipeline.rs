//! Cross-module checks through the public API.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dilute_fermi::fock::checks::{decomposition_identity, fermi_sea_energy, sector_pair};
use dilute_fermi::fock::io::{read_operator, write_operator};
use dilute_fermi::fock::particle_hole::ParticleHole;
use dilute_fermi::hf::hf_energy;
use dilute_fermi::lattice::{admissible_densities, fermi_ball};
use dilute_fermi::scattering::{scattering_length, solve};
use dilute_fermi::{
    BogoliubovTransform, CutoffPair, Decomposition, DecompositionOptions, FourierPotential, ModeSet, NeumannConfig,
    PairKernel, Part, RadialPotential, Spin, SpinFilter,
};

fn bump() -> RadialPotential {
    RadialPotential::Bump { v0: 2.0, r0: 1.0 }
}

#[test]
fn admissible_counts_give_complete_balls() {
    let counts: Vec<usize> = admissible_densities(5.0, 200).unwrap().iter().map(|c| c.0).collect();
    assert_eq!(&counts[..6], &[1, 7, 19, 27, 33, 57]);
    for n in counts {
        assert_eq!(fermi_ball(5.0, n, Spin::Up).unwrap().n(), n);
    }
}

#[test]
fn fock_engine_reproduces_hartree_fock_for_both_potentials() {
    for pot in [bump(), RadialPotential::SoftSphere { v0: 4.0, r0: 0.6 }] {
        let m = ModeSet::with_extra(4.5, 7, &[], 1, &[], 16).unwrap();
        let f = FourierPotential::new(pot);
        let c = fermi_sea_energy(&m, &f).unwrap();
        let e = hf_energy(m.balls(), &f).unwrap();
        assert_eq!(c.hartree_fock, e.total);
        assert!(c.relative_error < 1e-12, "{c:?}");
    }
}

#[test]
fn decomposition_identity_with_scattering_length_scale_potential() {
    let m = ModeSet::with_extra(4.0, 7, &[[2, 0, 0]], 1, &[[1, 0, 0], [0, 0, -1]], 16).unwrap();
    let k = PairKernel::fourier(&m, &FourierPotential::new(bump())).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = decomposition_identity(&m, &k, DecompositionOptions::default(), 10, &mut rng).unwrap();
    assert!(c.max_residual < 1e-12 && c.operator_residual < 1e-12, "{c:?}");
}

#[test]
fn bogoliubov_transformation_of_the_scattering_solution() {
    let m = ModeSet::with_extra(4.0, 7, &[[1, 1, 0]], 7, &[[-1, -1, 0]], 16).unwrap();
    let (_, b) = sector_pair(&m).unwrap();
    let rho: f64 = m.balls().iter().map(|x| x.density()).sum();
    let sol = solve(&bump(), 1.0 / 3.0, rho, &NeumannConfig::default()).unwrap();
    assert!((sol.a0 - scattering_length(&bump(), 10_000).unwrap()).abs() < 1e-12);
    let pair = dilute_fermi::fock::boson::build_b(&m, &b, &CutoffPair::indicator(&m), &sol).unwrap();
    assert!(pair.operator.nnz() > 0);
    let t = BogoliubovTransform::new(&pair.operator).unwrap();
    assert!(t.unitarity_residual(1.0) < 1e-12);
    assert!(t.group_residual(0.25, 0.75) < 1e-12);
    // T_λ followed by its adjoint is the identity
    let omega = b.unit(0).unwrap();
    let moved = t.apply(1.0, &omega);
    let back = t.apply_adjoint(1.0, &moved);
    assert!(back.iter().zip(&omega).all(|(x, y)| (x - y).norm() < 1e-12));
}

#[test]
fn operators_round_trip_through_the_triplet_format() {
    let m = ModeSet::with_extra(3.0, 1, &[[1, 0, 0], [0, 1, 0]], 1, &[[-1, 0, 0]], 16).unwrap();
    let k = PairKernel::fourier(&m, &FourierPotential::new(bump())).unwrap();
    let (a, b) = sector_pair(&m).unwrap();
    let d = Decomposition::new(&m, &k, DecompositionOptions::default()).unwrap();
    let x = d.operator(Part::X, SpinFilter::All, &b).unwrap();
    let text = write_operator(&x, b.descriptor_hash());
    let (hash, back) = read_operator(&text).unwrap();
    assert_eq!(hash, b.descriptor_hash());
    assert_eq!(back.sub(&x).max_abs(), 0.0);
    let r = ParticleHole::new(&m).unwrap();
    assert_eq!(r.operator(&b, &a).unwrap().rows(), a.dim());
}
