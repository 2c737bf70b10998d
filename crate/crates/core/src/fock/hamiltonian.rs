use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::modes::ModeSet;
use crate::fock::operator::{build_on, FermiOp, SparseOperator, Term};
use crate::lattice::Spin;
use crate::potential::FourierPotential;

/// A radial lattice kernel `p ↦ w(|p|)`, tabulated on `|n|² = 0..=max`, with
/// `p = (2π/L) n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairKernel {
    pub l: f64,
    values: Vec<f64>,
}

impl PairKernel {
    pub fn from_fn(l: f64, max_nsq: i64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        let scale = 2.0 * std::f64::consts::PI / l;
        let values = (0..=max_nsq)
            .map(|m| f(scale * (m as f64).sqrt()))
            .collect::<Result<Vec<_>>>()?;
        Ok(PairKernel { l, values })
    }

    /// `V̂` on every momentum transfer within the mode set.
    pub fn fourier(modes: &ModeSet, v: &FourierPotential) -> Result<Self> {
        PairKernel::from_fn(modes.l, modes.max_distance_sq(), |p| v.at(p))
    }

    pub fn constant(l: f64, max_nsq: i64, c: f64) -> Self {
        PairKernel {
            l,
            values: vec![c; max_nsq as usize + 1],
        }
    }

    pub fn at_nsq(&self, nsq: i64) -> f64 {
        self.values[nsq as usize]
    }

    pub fn at(&self, n: [i32; 3]) -> f64 {
        self.at_nsq(nsq(n))
    }

    pub fn max_nsq(&self) -> i64 {
        self.values.len() as i64 - 1
    }
}

pub(crate) fn nsq(n: [i32; 3]) -> i64 {
    n.iter().map(|&x| (x as i64) * (x as i64)).sum()
}

pub(crate) fn sub(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn add(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn neg(a: [i32; 3]) -> [i32; 3] {
    [-a[0], -a[1], -a[2]]
}

/// `coeff · a*_{m[0]} a*_{m[1]} a_{m[2]} a_{m[3]}` with
/// `m = [(k+p,σ), (k'−p,σ'), (k',σ'), (k,σ)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadruple {
    pub m: [usize; 4],
    pub coeff: f64,
    pub same_spin: bool,
}

impl Quadruple {
    pub fn term(&self) -> Term {
        Term::new(
            self.coeff,
            vec![
                FermiOp::create(self.m[0]),
                FermiOp::create(self.m[1]),
                FermiOp::annihilate(self.m[2]),
                FermiOp::annihilate(self.m[3]),
            ],
        )
    }
}

/// All interaction quadruples `(1/2L³) V̂(p)` inside the mode set, and the number of
/// `(k, k', p)` triples dropped because `(k'−p, σ')` lies outside it.
pub fn interaction_quadruples(modes: &ModeSet, kernel: &PairKernel) -> Result<(Vec<Quadruple>, usize)> {
    if kernel.max_nsq() < modes.max_distance_sq() {
        return Err(Error::InvalidInput(
            "pair kernel table is shorter than the mode set".into(),
        ));
    }
    let l3 = modes.l.powi(3);
    let mut out = Vec::new();
    let mut dropped = 0;
    for s in Spin::BOTH {
        for t in Spin::BOTH {
            for m4 in modes.indices(s) {
                let k = modes.mode(m4).momentum.n;
                for m3 in modes.indices(t) {
                    let kp = modes.mode(m3).momentum.n;
                    for m1 in modes.indices(s) {
                        let p = sub(modes.mode(m1).momentum.n, k);
                        match modes.find(sub(kp, p), t) {
                            Some(m2) => out.push(Quadruple {
                                m: [m1, m2, m3, m4],
                                coeff: kernel.at(p) / (2.0 * l3),
                                same_spin: s == t,
                            }),
                            None => dropped += 1,
                        }
                    }
                }
            }
        }
    }
    Ok((out, dropped))
}

pub fn kinetic_terms(modes: &ModeSet) -> Vec<Term> {
    modes
        .modes()
        .iter()
        .enumerate()
        .map(|(i, m)| Term::new(m.momentum.ksq(), vec![FermiOp::create(i), FermiOp::annihilate(i)]))
        .collect()
}

/// The truncated Hamiltonian and its dropped-quadruple count.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub operator: SparseOperator,
    pub kinetic: SparseOperator,
    pub interaction: SparseOperator,
    pub dropped: usize,
}

pub fn hamiltonian(modes: &ModeSet, kernel: &PairKernel, basis: &FockBasis) -> Result<Hamiltonian> {
    let kinetic = diagonal(basis, |s| {
        occupied(s, modes.len()).map(|i| modes.mode(i).momentum.ksq()).sum()
    });
    let (quads, dropped) = interaction_quadruples(modes, kernel)?;
    let terms: Vec<Term> = quads.iter().map(Quadruple::term).collect();
    let interaction = build_on(basis, &terms)?;
    Ok(Hamiltonian {
        operator: kinetic.add(&interaction),
        kinetic,
        interaction,
        dropped,
    })
}

pub(crate) fn occupied(s: u32, m: usize) -> impl Iterator<Item = usize> {
    (0..m).filter(move |i| s & (1 << i) != 0)
}

pub fn diagonal(basis: &FockBasis, f: impl Fn(u32) -> f64) -> SparseOperator {
    let d: Vec<f64> = basis.states().iter().map(|&s| f(s)).collect();
    SparseOperator::diagonal(&d)
}

/// `N_σ`, or the total number when `spin` is `None`.
pub fn number_operator(modes: &ModeSet, basis: &FockBasis, spin: Option<Spin>) -> SparseOperator {
    let mask = match spin {
        Some(s) => modes.spin_mask(s),
        None => u32::MAX,
    };
    diagonal(basis, |s| (s & mask).count_ones() as f64)
}

/// Number of excitations (particles outside plus holes inside the balls) measured in
/// the particle-hole frame, i.e. the occupation count of a conjugated state.
pub fn excitation_number(basis: &FockBasis) -> SparseOperator {
    diagonal(basis, |s| s.count_ones() as f64)
}

/// Reference frame for momentum operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// `P = Σ k n_k`.
    Original,
    /// `R* P R − P(Ψ_FFG)`: particles carry `+k`, holes `−k`.
    ParticleHole,
}

/// Component `axis` of the total momentum, in integer units of `2π/L`.
pub fn total_momentum(modes: &ModeSet, basis: &FockBasis, axis: usize, frame: Frame) -> SparseOperator {
    diagonal(basis, |s| {
        occupied(s, modes.len())
            .map(|i| {
                let m = modes.mode(i);
                let k = m.momentum.n[axis] as f64;
                if frame == Frame::ParticleHole && m.in_ball {
                    -k
                } else {
                    k
                }
            })
            .sum()
    })
}

pub fn complex(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
