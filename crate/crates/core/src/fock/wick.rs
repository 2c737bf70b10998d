//! Decomposition of the particle-hole conjugated Hamiltonian `R* H R` by normal
//! ordering every conjugated monomial.
//!
//! Under `R`, `a_k` becomes `a*_k` on ball modes, so each interaction quadruple turns
//! into a string of the new creators/annihilators. Normal ordering it produces
//! contractions (a pair of positions sharing a mode). Contractions between positions
//! `{0,3}` or `{1,2}` are direct, `{0,2}` or `{1,3}` exchange. Constants form `E_HF`,
//! exchange-contracted quadratics form `X`, direct-contracted quadratics together with
//! the kinetic remainder `Σ_σ (k_F^σ)² (N_off,σ − N_ball,σ)` form `Charge`, which
//! vanishes on the charge-neutral sector, and quartic monomials are sorted into
//! `Q1..Q4` by their shape.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::fock::basis::FockBasis;
use crate::fock::hamiltonian::{interaction_quadruples, PairKernel};
use crate::fock::modes::ModeSet;
use crate::fock::operator::{build_on, FermiOp, SparseOperator, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Part {
    /// `Σ ||k|² − (k_F^σ)²| n_{k,σ}`.
    H0,
    /// Exchange-type quadratic term.
    X,
    /// Particle-particle scattering among off-ball modes.
    Q1,
    /// Number-conserving quartic terms involving at least one ball mode.
    Q2,
    /// Three creators and one annihilator, plus adjoint.
    Q3,
    /// Four creators, plus adjoint.
    Q4,
    /// Multiple of the particle-hole charge; zero on the image of `(N↑, N↓)`.
    Charge,
}

impl Part {
    pub const ALL: [Part; 7] = [Part::H0, Part::X, Part::Q1, Part::Q2, Part::Q3, Part::Q4, Part::Charge];
    pub const QUARTIC: [Part; 4] = [Part::Q1, Part::Q2, Part::Q3, Part::Q4];
}

/// Which spin pairings `(σ, σ')` of the interaction to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinFilter {
    All,
    /// `σ ≠ σ'` only (the tilde operators).
    Opposite,
    /// `σ = σ'` only (the equal-spin remainder).
    Equal,
}

impl SpinFilter {
    fn admits(self, same_spin: bool) -> bool {
        match self {
            SpinFilter::All => true,
            SpinFilter::Opposite => !same_spin,
            SpinFilter::Equal => same_spin,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecompositionOptions {
    /// Test hook: flips the sign of `X`.
    pub corrupt_exchange_sign: bool,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub e_hf: f64,
    pub e_kinetic: f64,
    pub e_direct: f64,
    pub e_exchange: f64,
    /// Quadruples dropped by the mode-set truncation.
    pub dropped: usize,
    terms: BTreeMap<(Part, bool), BTreeMap<Vec<FermiOp>, f64>>,
}

/// A normal-ordered product with its sign and the contractions that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Ordered {
    pub sign: f64,
    pub ops: Vec<FermiOp>,
    pub contractions: Vec<(usize, usize)>,
}

/// Normal-orders `ops` (creators to the left) using `a_m a*_m = 1 − a*_m a_m`.
pub fn normal_order(ops: &[FermiOp]) -> Vec<Ordered> {
    let tagged: Vec<(FermiOp, usize)> = ops.iter().copied().zip(0..).collect();
    let mut out = Vec::new();
    recurse(tagged, 1.0, Vec::new(), &mut out);
    out
}

fn recurse(ops: Vec<(FermiOp, usize)>, sign: f64, contr: Vec<(usize, usize)>, out: &mut Vec<Ordered>) {
    let Some(i) = (0..ops.len().saturating_sub(1)).find(|&i| !ops[i].0.dagger && ops[i + 1].0.dagger) else {
        out.push(Ordered {
            sign,
            ops: ops.into_iter().map(|o| o.0).collect(),
            contractions: contr,
        });
        return;
    };
    let mut swapped = ops.clone();
    swapped.swap(i, i + 1);
    recurse(swapped, -sign, contr.clone(), out);
    if ops[i].0.mode == ops[i + 1].0.mode {
        let (p, q) = (ops[i].1, ops[i + 1].1);
        let mut rest = ops;
        rest.drain(i..i + 2);
        let mut c = contr;
        c.push((p.min(q), p.max(q)));
        recurse(rest, sign, c, out);
    }
}

/// Sorts a normal-ordered product into creators ascending, annihilators descending.
/// Returns `None` if a mode repeats.
pub fn canonical(ops: &[FermiOp]) -> Option<(Vec<FermiOp>, f64)> {
    let mut v = ops.to_vec();
    let key = |o: &FermiOp| {
        if o.dagger {
            (0, o.mode as i32)
        } else {
            (1, -(o.mode as i32))
        }
    };
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if key(&v[j]) > key(&v[j + 1]) {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

fn is_direct(c: (usize, usize)) -> bool {
    c == (0, 3) || c == (1, 2)
}

impl Decomposition {
    pub fn new(modes: &ModeSet, kernel: &PairKernel, opts: DecompositionOptions) -> Result<Self> {
        let conj = |op: FermiOp| {
            if modes.mode(op.mode as usize).in_ball {
                op.adjoint()
            } else {
                op
            }
        };
        let mut d = Decomposition {
            e_hf: 0.0,
            e_kinetic: 0.0,
            e_direct: 0.0,
            e_exchange: 0.0,
            dropped: 0,
            terms: BTreeMap::new(),
        };

        for (i, m) in modes.modes().iter().enumerate() {
            let ksq = m.momentum.ksq();
            let h0 = (ksq - modes.kf_sq(m.spin)).abs();
            let ops = [conj(FermiOp::create(i)), conj(FermiOp::annihilate(i))];
            for o in normal_order(&ops) {
                if o.ops.is_empty() {
                    d.e_kinetic += o.sign * ksq;
                } else {
                    // kinetic quadratic = H0 + charge part
                    d.add(Part::H0, false, &[FermiOp::create(i), FermiOp::annihilate(i)], h0);
                    d.add(Part::Charge, false, &o.ops, o.sign * ksq);
                    d.add(Part::Charge, false, &[FermiOp::create(i), FermiOp::annihilate(i)], -h0);
                }
            }
        }

        let (quads, dropped) = interaction_quadruples(modes, kernel)?;
        d.dropped = dropped;
        let x_sign = if opts.corrupt_exchange_sign { -1.0 } else { 1.0 };
        for q in &quads {
            let ops = [
                conj(FermiOp::create(q.m[0])),
                conj(FermiOp::create(q.m[1])),
                conj(FermiOp::annihilate(q.m[2])),
                conj(FermiOp::annihilate(q.m[3])),
            ];
            for o in normal_order(&ops) {
                let c = q.coeff * o.sign;
                match o.ops.len() {
                    0 => {
                        if is_direct(o.contractions[0]) {
                            d.e_direct += c;
                        } else {
                            d.e_exchange += c;
                        }
                    }
                    2 => {
                        if is_direct(o.contractions[0]) {
                            d.add(Part::Charge, false, &o.ops, c);
                        } else {
                            d.add(Part::X, false, &o.ops, x_sign * c);
                        }
                    }
                    _ => {
                        let part = quartic_part(modes, &o.ops);
                        d.add(part, q.same_spin, &o.ops, c);
                    }
                }
            }
        }
        d.e_hf = d.e_kinetic + d.e_direct + d.e_exchange;
        Ok(d)
    }

    fn add(&mut self, part: Part, same_spin: bool, ops: &[FermiOp], c: f64) {
        if let Some((key, s)) = canonical(ops) {
            *self
                .terms
                .entry((part, same_spin))
                .or_default()
                .entry(key)
                .or_insert(0.0) += s * c;
        }
    }

    /// Canonical monomials of a part.
    pub fn terms(&self, part: Part, filter: SpinFilter) -> Vec<Term> {
        self.terms
            .iter()
            .filter(|((p, same), _)| *p == part && filter.admits(*same))
            .flat_map(|(_, m)| m.iter())
            .filter(|(_, &c)| c != 0.0)
            .map(|(ops, &c)| Term::new(c, ops.clone()))
            .collect()
    }

    pub fn term_count(&self, part: Part) -> usize {
        self.terms(part, SpinFilter::All).len()
    }

    pub fn operator(&self, part: Part, filter: SpinFilter, basis: &FockBasis) -> Result<SparseOperator> {
        build_on(basis, &self.terms(part, filter))
    }

    /// `Σ_i Q_i` restricted by spin pairing.
    pub fn quartic(&self, filter: SpinFilter, basis: &FockBasis) -> Result<SparseOperator> {
        let terms: Vec<Term> = Part::QUARTIC.iter().flat_map(|&p| self.terms(p, filter)).collect();
        build_on(basis, &terms)
    }

    /// `E_HF + H0 + X + ΣQ + Charge`.
    pub fn reconstruct(&self, basis: &FockBasis) -> Result<SparseOperator> {
        let terms: Vec<Term> = Part::ALL.iter().flat_map(|&p| self.terms(p, SpinFilter::All)).collect();
        Ok(build_on(basis, &terms)?.shift(self.e_hf))
    }

    /// `E_HF + H0 + X + Σ Q̃` (opposite-spin quartic terms only).
    pub fn reduced(&self, basis: &FockBasis) -> Result<SparseOperator> {
        let mut terms = self.terms(Part::H0, SpinFilter::All);
        terms.extend(self.terms(Part::X, SpinFilter::All));
        for p in Part::QUARTIC {
            terms.extend(self.terms(p, SpinFilter::Opposite));
        }
        Ok(build_on(basis, &terms)?.shift(self.e_hf))
    }
}

fn quartic_part(modes: &ModeSet, ops: &[FermiOp]) -> Part {
    let creators = ops.iter().filter(|o| o.dagger).count();
    match creators {
        0 | 4 => Part::Q4,
        1 | 3 => Part::Q3,
        _ if ops.iter().all(|o| !modes.mode(o.mode as usize).in_ball) => Part::Q1,
        _ => Part::Q2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::Sector;
    use crate::fock::hamiltonian::hamiltonian;
    use crate::fock::particle_hole::ParticleHole;
    use crate::hf;
    use crate::lattice::Spin;
    use crate::potential::{FourierPotential, RadialPotential};

    fn setup(
        n_up: usize,
        extra_up: &[[i32; 3]],
        n_down: usize,
        extra_down: &[[i32; 3]],
    ) -> (ModeSet, PairKernel, FourierPotential) {
        let ms = ModeSet::with_extra(4.0, n_up, extra_up, n_down, extra_down, 16).unwrap();
        let v = FourierPotential::new(RadialPotential::Bump { v0: 3.0, r0: 1.2 });
        let k = PairKernel::fourier(&ms, &v).unwrap();
        (ms, k, v)
    }

    #[test]
    fn normal_order_single_mode() {
        let a = FermiOp::annihilate(0);
        let ad = FermiOp::create(0);
        let r = normal_order(&[a, ad]);
        assert_eq!(r.len(), 2);
        assert_eq!(
            r[0],
            Ordered {
                sign: -1.0,
                ops: vec![ad, a],
                contractions: vec![]
            }
        );
        assert_eq!(
            r[1],
            Ordered {
                sign: 1.0,
                ops: vec![],
                contractions: vec![(0, 1)]
            }
        );
    }

    #[test]
    fn normal_order_preserves_the_operator() {
        let ms = ModeSet::with_extra(1.0, 1, &[[1, 0, 0]], 1, &[], 16).unwrap();
        let b = FockBasis::build(&ms, Sector::Full).unwrap();
        let ops = vec![
            FermiOp::annihilate(0),
            FermiOp::annihilate(1),
            FermiOp::create(1),
            FermiOp::create(0),
        ];
        let lhs = build_on(&b, &[Term::new(1.0, ops.clone())]).unwrap();
        let rhs: Vec<Term> = normal_order(&ops)
            .into_iter()
            .map(|o| Term::new(o.sign, o.ops))
            .collect();
        assert!(lhs.sub(&build_on(&b, &rhs).unwrap()).max_abs() < 1e-15);
    }

    #[test]
    fn canonical_sign_and_duplicates() {
        let (v, s) = canonical(&[
            FermiOp::create(2),
            FermiOp::create(1),
            FermiOp::annihilate(0),
            FermiOp::annihilate(3),
        ])
        .unwrap();
        assert_eq!(
            v,
            vec![
                FermiOp::create(1),
                FermiOp::create(2),
                FermiOp::annihilate(3),
                FermiOp::annihilate(0)
            ]
        );
        assert_eq!(s, 1.0);
        assert!(canonical(&[FermiOp::create(1), FermiOp::create(1)]).is_none());
    }

    #[test]
    fn reconstructs_conjugated_hamiltonian_on_full_space() {
        let (ms, k, _) = setup(
            1,
            &[[1, 0, 0], [-1, 0, 0], [0, 1, 0]],
            1,
            &[[1, 0, 0], [-1, 0, 0], [0, -1, 0]],
        );
        let full = FockBasis::build(&ms, Sector::Full).unwrap();
        let h = hamiltonian(&ms, &k, &full).unwrap().operator;
        let r = ParticleHole::new(&ms).unwrap();
        let conj = r.conjugate(&h, &full, &full).unwrap();
        let d = Decomposition::new(&ms, &k, DecompositionOptions::default()).unwrap();
        let rec = d.reconstruct(&full).unwrap();
        assert!(conj.sub(&rec).max_abs() < 1e-13 * conj.max_abs());
        for p in Part::ALL {
            assert!(
                d.operator(p, SpinFilter::All, &full).unwrap().hermiticity_defect() < 1e-14,
                "{p:?}"
            );
        }
        let bad = Decomposition::new(
            &ms,
            &k,
            DecompositionOptions {
                corrupt_exchange_sign: true,
            },
        )
        .unwrap();
        assert!(conj.sub(&bad.reconstruct(&full).unwrap()).max_abs() > 1e-6);
    }

    #[test]
    fn constant_matches_hartree_fock_energy() {
        let (ms, k, v) = setup(7, &[], 1, &[[1, 1, 0]]);
        let d = Decomposition::new(&ms, &k, DecompositionOptions::default()).unwrap();
        let e = hf::hf_energy(&[ms.ball(Spin::Up).clone(), ms.ball(Spin::Down).clone()], &v).unwrap();
        assert!((d.e_hf - e.total).abs() < 1e-12 * e.total.abs());
        assert!((d.e_exchange - e.exchange).abs() < 1e-12 * e.exchange.abs());
    }

    #[test]
    fn charge_vanishes_on_neutral_sector() {
        let (ms, k, _) = setup(1, &[[1, 0, 0], [0, 1, 0]], 1, &[[1, 0, 0], [0, 0, 1]]);
        let d = Decomposition::new(&ms, &k, DecompositionOptions::default()).unwrap();
        let b = FockBasis::particle_hole_image(&ms, 1, 1).unwrap();
        assert!(d.operator(Part::Charge, SpinFilter::All, &b).unwrap().max_abs() < 1e-14);
        let full = FockBasis::build(&ms, Sector::Full).unwrap();
        assert!(d.operator(Part::Charge, SpinFilter::All, &full).unwrap().max_abs() > 0.0);
    }
}
