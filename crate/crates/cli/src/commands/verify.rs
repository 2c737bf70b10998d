//! Verification suite on small mode sets. Every check records the measured value, the
//! threshold and the relation between them; diagnostics carry quantities with no
//! pass/fail meaning. Nothing time-dependent enters the report.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use dilute_fermi::fock::bogoliubov::duhamel_check;
use dilute_fermi::fock::boson::{build_b, regularized_q4};
use dilute_fermi::fock::checks::{
    approx_ground_state, decomposition_identity, equal_spin_discard, fermi_sea_energy, near_bosonicity,
    propagation_log, random_state, sector_pair, vacuum_commutator_sweep,
};
use dilute_fermi::fock::eigen::ground_state;
use dilute_fermi::fock::hamiltonian::{
    excitation_number, hamiltonian, interaction_quadruples, kinetic_terms, total_momentum, Frame,
};
use dilute_fermi::fock::operator::{norm, FermiOp, Term};
use dilute_fermi::fock::particle_hole::ParticleHole;
use dilute_fermi::fock::printed::{printed_operator, required_kernel_nsq, Variant};
use dilute_fermi::scattering::solve;
use dilute_fermi::{
    BogoliubovTransform, CutoffPair, Decomposition, DecompositionOptions, FourierPotential, ModeSet, NeumannConfig,
    PairKernel, Part, SparseOperator, Spin, SpinFilter,
};

use crate::config::{Config, CutoffChoice};
use crate::error::CliError;
use crate::output::VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, measured: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => measured <= threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::Equal => measured == threshold,
        };
        Check {
            name: name.into(),
            measured,
            relation,
            threshold,
            passed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub diagnostics: BTreeMap<String, Value>,
    pub passed: bool,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Builder {
    checks: Vec<Check>,
    diagnostics: BTreeMap<String, Value>,
}

impl Builder {
    fn check(&mut self, name: &str, measured: f64, relation: Relation, threshold: f64) {
        self.checks.push(Check::new(name, measured, relation, threshold));
    }

    fn note(&mut self, name: &str, v: impl Serialize) {
        self.diagnostics
            .insert(name.into(), serde_json::to_value(v).expect("diagnostic serializes"));
    }
}

/// Largest deviation of `{a_i, a*_j} = δ_ij` over every mode pair and bitstring.
fn car_defect(m: usize) -> f64 {
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let ai = FermiOp::annihilate(i);
            let cj = FermiOp::create(j);
            let mut worst: f64 = 0.0;
            for s in 0..(1u32 << m) {
                let mut out: Vec<(u32, f64)> = Vec::with_capacity(2);
                for ops in [[ai, cj], [cj, ai]] {
                    if let Some((t, sign)) = Term::new(1.0, ops.to_vec()).apply(s) {
                        match out.iter_mut().find(|o| o.0 == t) {
                            Some(o) => o.1 += sign,
                            None => out.push((t, sign)),
                        }
                    }
                }
                let want = if i == j { 1.0 } else { 0.0 };
                let diag = out.iter().find(|o| o.0 == s).map_or(0.0, |o| o.1);
                worst = worst.max((diag - want).abs());
                for o in out.iter().filter(|o| o.0 != s) {
                    worst = worst.max(o.1.abs());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Terms of `H` that change `N↑`, `N↓` or the total momentum.
fn conservation_violations(modes: &ModeSet, terms: &[Term]) -> usize {
    terms
        .iter()
        .filter(|t| {
            let mut spin = [0i64; 2];
            let mut p = [0i64; 3];
            for op in &t.ops {
                let m = modes.mode(op.mode as usize);
                let sign = if op.dagger { 1 } else { -1 };
                spin[m.spin.index()] += sign;
                for (pa, na) in p.iter_mut().zip(m.momentum.n) {
                    *pa += sign * na as i64;
                }
            }
            spin != [0, 0] || p != [0, 0, 0]
        })
        .count()
}

fn max_commutator_with_momentum(
    a: &SparseOperator,
    modes: &ModeSet,
    basis: &dilute_fermi::FockBasis,
    frame: Frame,
) -> f64 {
    (0..3)
        .map(|axis| a.commutator(&total_momentum(modes, basis, axis, frame)).max_abs())
        .fold(0.0, f64::max)
}

pub fn run(cfg: &Config, hash: &str) -> Result<Report, CliError> {
    let v = &cfg.verify;
    let tol = v.identity_tol;
    let pot = cfg.potential.radial();
    let fourier = FourierPotential::with_tolerance(pot, cfg.potential.fourier_tol);
    let modes = cfg.modes.mode_set()?;
    let mut out = Builder {
        checks: Vec::new(),
        diagnostics: BTreeMap::new(),
    };
    out.note("modes", modes.descriptor());
    out.note("mode_count", modes.len());

    // canonical anticommutation relations on the full Fock space
    out.check("car_anticommutators", car_defect(modes.len()), Relation::AtMost, tol);

    // Hamiltonian structure
    let kernel = PairKernel::fourier(&modes, &fourier)?;
    let (a, b) = sector_pair(&modes)?;
    out.note("sector_dim", a.dim());
    let ham = hamiltonian(&modes, &kernel, &a)?;
    out.note("dropped_quadruples", ham.dropped);
    out.check(
        "hamiltonian_hermiticity",
        ham.operator.hermiticity_defect(),
        Relation::AtMost,
        tol,
    );
    let (quads, _) = interaction_quadruples(&modes, &kernel)?;
    let mut terms = kinetic_terms(&modes);
    terms.extend(quads.iter().map(|q| q.term()));
    out.check(
        "hamiltonian_conservation_violations",
        conservation_violations(&modes, &terms) as f64,
        Relation::Equal,
        0.0,
    );
    out.check(
        "hamiltonian_momentum_commutator",
        max_commutator_with_momentum(&ham.operator, &modes, &a, Frame::Original),
        Relation::AtMost,
        tol,
    );

    // particle-hole transformation
    let r = ParticleHole::new(&modes)?;
    out.check(
        "particle_hole_identity_defects",
        r.identity_defects() as f64,
        Relation::Equal,
        0.0,
    );
    let rop = r.operator(&b, &a)?;
    let id = SparseOperator::identity(a.dim());
    let unit = rop
        .adjoint()
        .mul(&rop)
        .sub(&id)
        .max_abs()
        .max(rop.mul(&rop.adjoint()).sub(&id).max_abs());
    out.check("particle_hole_unitarity", unit, Relation::AtMost, tol);

    // Fermi sea energy against the lattice Hartree-Fock sum
    let sea_modes = cfg.modes.sea_only()?;
    let sea = fermi_sea_energy(&sea_modes, &fourier)?;
    out.note("fermi_sea_modes", sea_modes.descriptor());
    out.note("fermi_sea", sea);
    out.check(
        "fermi_sea_energy",
        sea.relative_error,
        Relation::AtMost,
        v.fermi_sea_tol,
    );

    // decomposition identity on random sector states
    let opts = DecompositionOptions {
        corrupt_exchange_sign: v.corrupt_exchange_sign,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let dec = decomposition_identity(&modes, &kernel, opts, v.draws, &mut rng)?;
    out.note("decomposition", &dec);
    out.check(
        "decomposition_identity",
        dec.max_residual,
        Relation::AtMost,
        v.decomposition_tol,
    );
    let d = Decomposition::new(&modes, &kernel, DecompositionOptions::default())?;
    out.check(
        "charge_vanishes_on_sector",
        d.operator(Part::Charge, SpinFilter::All, &b)?.max_abs(),
        Relation::AtMost,
        tol,
    );

    // equal-spin discard
    let dmodes = cfg.discard.mode_set()?;
    let dkernel = PairKernel::fourier(&dmodes, &fourier)?;
    let disc = equal_spin_discard(&dmodes, &dkernel)?;
    out.note("discard_modes", dmodes.descriptor());
    out.note("discard", disc);
    out.check(
        "equal_spin_discard_min_eigenvalue",
        disc.min_eigenvalue,
        Relation::AtLeast,
        -v.discard_tol,
    );
    out.check(
        "equal_spin_interaction_min_eigenvalue",
        disc.equal_spin_interaction_min,
        Relation::AtLeast,
        -v.discard_tol,
    );

    // closed-form expressions against normal ordering
    let pkernel = PairKernel::from_fn(modes.l, required_kernel_nsq(&modes), |p| fourier.at(p))?;
    let mut corrected: f64 = 0.0;
    let mut as_printed = BTreeMap::new();
    for part in [Part::X, Part::Q1, Part::Q2, Part::Q3, Part::Q4] {
        let wick = d.operator(part, SpinFilter::All, &b)?;
        let fixed = printed_operator(part, Variant::Corrected, &modes, &pkernel, SpinFilter::All, &b)?;
        corrected = corrected.max(fixed.sub(&wick).max_abs());
        let raw = printed_operator(part, Variant::AsPrinted, &modes, &pkernel, SpinFilter::All, &b)?;
        as_printed.insert(
            format!("{part:?}"),
            json!({ "deviation": raw.sub(&wick).max_abs(), "deviation_of_negative": raw.add(&wick).max_abs() }),
        );
    }
    out.note("closed_form_as_printed", as_printed);
    out.check("closed_form_corrected", corrected, Relation::AtMost, tol);

    // pseudo-boson vacuum commutators
    let sweep = vacuum_commutator_sweep(&modes, v.sweep_nsq)?;
    let mismatches = sweep
        .iter()
        .filter(|c| c.matrix_value != c.lattice_count as f64)
        .count();
    out.note("vacuum_commutator_transfers", sweep.len());
    out.check("vacuum_commutator_mismatches", mismatches as f64, Relation::Equal, 0.0);

    // cutoffs, pair operator and Bogoliubov transformation
    let cut = match v.cutoff {
        CutoffChoice::Indicator => CutoffPair::indicator(&modes),
        CutoffChoice::Smooth => CutoffPair::smooth(&modes, v.alpha, v.beta)?,
    };
    let gaps: Vec<f64> = Spin::BOTH
        .iter()
        .map(|&s| cut.regularized_density(s).map(|rr| rr - cut.rho[s.index()]))
        .collect::<Result<_, _>>()?;
    out.note("regularized_density_gaps", gaps);
    let mut bos = Vec::new();
    let mut excess: f64 = f64::NEG_INFINITY;
    for p in [[1, 0, 0], [1, 1, 0]] {
        for spin in Spin::BOTH {
            for m in 0..=v.bosonicity_excitations {
                let nb = near_bosonicity(&modes, &cut, p, spin, m)?;
                excess = excess.max(nb.deviation - nb.bound);
                bos.push(nb);
            }
        }
    }
    out.note("near_bosonicity", bos);
    out.check("near_bosonicity_excess", excess, Relation::AtMost, tol);

    let rho: f64 = modes.balls().iter().map(|x| x.density()).sum();
    let sol = solve(&pot, v.gamma, rho, &NeumannConfig::default())?;
    out.note(
        "scattering",
        json!({ "rho": rho, "radius": sol.radius, "lambda": sol.lambda, "a_gamma": sol.a_gamma, "a": sol.a0 }),
    );
    let pair = build_b(&modes, &b, &cut, &sol)?;
    out.note("pair_operator_missing_modes", pair.missing_modes);
    out.note("pair_operator_aliasing_bound", pair.aliasing_bound);
    out.note("pair_operator_nnz", pair.operator.nnz());
    let omega = b.unit(0).expect("vacuum lies in the neutral sector");
    out.check(
        "pair_operator_annihilates_vacuum",
        norm(&pair.operator.matvec(&omega)),
        Relation::AtMost,
        tol,
    );
    out.check(
        "pair_operator_momentum_commutator",
        max_commutator_with_momentum(&pair.operator, &modes, &b, Frame::ParticleHole),
        Relation::AtMost,
        tol,
    );
    let q4r = regularized_q4(&modes, &b, &kernel, &CutoffPair::indicator(&modes))?;
    out.check(
        "regularized_q4_indicator_limit",
        q4r.sub(&d.operator(Part::Q4, SpinFilter::Opposite, &b)?).max_abs(),
        Relation::AtMost,
        tol,
    );

    let t = BogoliubovTransform::new(&pair.operator)?;
    let unitarity = v.lambdas.iter().map(|&l| t.unitarity_residual(l)).fold(0.0, f64::max);
    out.check("bogoliubov_unitarity", unitarity, Relation::AtMost, v.unitarity_tol);
    let group = [(0.3, 0.4), (0.5, 0.5), (-0.2, 0.7), (1.0, -1.0)]
        .iter()
        .map(|&(x, y)| t.group_residual(x, y))
        .fold(0.0, f64::max);
    out.check("bogoliubov_group_law", group, Relation::AtMost, v.group_tol);

    let conj = r.conjugate(&ham.operator, &a, &b)?;
    let (e0, gs) = ground_state(&ham.operator)?;
    let phi = r.pull(&gs, &a, &b)?;
    out.note("ground_state_energy", e0);
    out.note("ground_state_ph_energy", conj.expectation(&phi).re);
    let n_ex = excitation_number(&b);
    let coarse = duhamel_check(&t, &n_ex, &phi, v.duhamel_lambda, v.duhamel_h);
    let fine = duhamel_check(&t, &n_ex, &phi, v.duhamel_lambda, 0.5 * v.duhamel_h);
    // with a generator at roundoff level the derivative itself is roundoff and the
    // step-size dependence carries no information
    let vanishing = pair.operator.max_abs() <= 1e-14;
    out.note("pair_operator_vanishes", vanishing);
    let (ratio, deviation) = if vanishing {
        (f64::NAN, 0.0)
    } else {
        let ratio = coarse.residual / fine.residual;
        (ratio, (ratio / 4.0 - 1.0).abs())
    };
    out.note("duhamel", [coarse, fine]);
    out.note("duhamel_ratio", ratio);
    out.check("duhamel_second_order", deviation, Relation::AtMost, v.duhamel_ratio_tol);

    let h0 = d.operator(Part::H0, SpinFilter::All, &b)?;
    let q1 = d.operator(Part::Q1, SpinFilter::All, &b)?;
    let ops = [("H0", &h0), ("Q1", &q1), ("N", &n_ex)];
    let log = propagation_log(&t, &ops, &phi, &v.lambdas, v.slack);
    let start: Vec<f64> = ops.iter().map(|(_, o)| o.expectation(&phi).re).collect();
    let worst = log
        .values
        .iter()
        .flat_map(|row| row.iter().zip(&start).map(|(x, s)| x - (10.0 * s.abs() + v.slack)))
        .fold(f64::NEG_INFINITY, f64::max);
    out.note("propagation", &log);
    out.check("propagation_bounded", worst, Relation::AtMost, 0.0);

    let sea_state = rop.matvec(&omega);
    let random = random_state(a.dim(), &mut rng);
    out.note(
        "approximate_ground_state",
        json!({
            "ground_state": approx_ground_state(&gs, &ham.operator, &modes, v.ground_state_c),
            "fermi_sea": approx_ground_state(&sea_state, &ham.operator, &modes, v.ground_state_c),
            "random": approx_ground_state(&random, &ham.operator, &modes, v.ground_state_c),
        }),
    );

    let passed = out.checks.iter().all(|c| c.passed);
    Ok(Report {
        artifact: "dilute-fermi",
        version: VERSION,
        command: "verify",
        config_sha256: hash.into(),
        seed: cfg.run.seed,
        checks: out.checks,
        diagnostics: out.diagnostics,
        passed,
    })
}
