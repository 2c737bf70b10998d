//! Cutoff functions, pseudo-bosonic pair operators `b̂_{p,σ}`, the pair operator
//! `B = L^{-3} Σ_p φ̂(p) b̂_{p,↑} b̂_{−p,↓}` and its `V̂`-weighted analogue.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::hamiltonian::{add, neg, sub};
use crate::fock::modes::ModeSet;
use crate::fock::operator::{build_on, FermiOp, SparseOperator, Term};
use crate::lattice::{enumerate_shells, Spin};
use crate::numerics::smoothstep;
use crate::scattering::ScatteringSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutoffKind {
    /// `v̂ = 1_{B_F}`, `û = 1_{B_F^c}`.
    Indicator,
    /// Smoothstep ramps between the plateaus.
    Smooth,
}

/// The cutoff pair `(û^r_σ, v̂^r_σ)`.
///
/// Smooth version:
/// `v̂(k) = 1` for `|k| < k_F − ρ^α`, `0` for `|k| ≥ k_F`, `1 − s((|k| − k_F + ρ^α)/ρ^α)`
/// in between; `û(k) = 0` for `|k| ≤ k_F`, `s((|k| − k_F)/k_F)` up to `2k_F`, `1` up to
/// `1.5 ρ^{-β}`, `1 − s((|k| − 1.5ρ^{-β})/(0.5ρ^{-β}))` up to `2ρ^{-β}`, then `0`,
/// where `s` is the C^∞ smoothstep and `ρ = ρ_σ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffPair {
    pub kind: CutoffKind,
    pub alpha: f64,
    pub beta: f64,
    /// `ρ_σ` per spin.
    pub rho: [f64; 2],
    /// `k_F^σ` per spin.
    pub kf: [f64; 2],
    pub l: f64,
}

impl CutoffPair {
    pub fn indicator(modes: &ModeSet) -> Self {
        CutoffPair {
            kind: CutoffKind::Indicator,
            alpha: f64::INFINITY,
            beta: 0.0,
            rho: Spin::BOTH.map(|s| modes.ball(s).density()),
            kf: Spin::BOTH.map(|s| modes.ball(s).kf),
            l: modes.l,
        }
    }

    pub fn smooth(modes: &ModeSet, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cutoff exponents must be positive, got α={alpha}, β={beta}"
            )));
        }
        let c = CutoffPair {
            kind: CutoffKind::Smooth,
            alpha,
            beta,
            ..CutoffPair::indicator(modes)
        };
        for s in Spin::BOTH {
            let i = s.index();
            if 2.0 * c.kf[i] > 1.5 * c.rho[i].powf(-beta) {
                return Err(Error::InvalidInput(format!(
                    "û plateau is empty for spin {s:?}: 2k_F = {} > 1.5ρ^-β = {}",
                    2.0 * c.kf[i],
                    1.5 * c.rho[i].powf(-beta)
                )));
            }
        }
        Ok(c)
    }

    pub fn vhat(&self, spin: Spin, k: f64) -> f64 {
        let kf = self.kf[spin.index()];
        match self.kind {
            CutoffKind::Indicator => {
                if k <= kf {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffKind::Smooth => {
                let w = self.rho[spin.index()].powf(self.alpha);
                if k >= kf {
                    0.0
                } else if k < kf - w {
                    1.0
                } else {
                    1.0 - smoothstep((k - (kf - w)) / w)
                }
            }
        }
    }

    pub fn uhat(&self, spin: Spin, k: f64) -> f64 {
        let kf = self.kf[spin.index()];
        if k <= kf {
            return 0.0;
        }
        match self.kind {
            CutoffKind::Indicator => 1.0,
            CutoffKind::Smooth => {
                let top = self.rho[spin.index()].powf(-self.beta);
                if k < 2.0 * kf {
                    smoothstep((k - kf) / kf)
                } else if k <= 1.5 * top {
                    1.0
                } else if k < 2.0 * top {
                    1.0 - smoothstep((k - 1.5 * top) / (0.5 * top))
                } else {
                    0.0
                }
            }
        }
    }

    /// `ρ^r_σ = L^{-3} Σ_k v̂^r(k)²` over the whole lattice.
    pub fn regularized_density(&self, spin: Spin) -> Result<f64> {
        let kf = self.kf[spin.index()];
        let shells = enumerate_shells(self.l, kf, crate::lattice::DEFAULT_POINT_LIMIT)?;
        let sum: f64 = shells
            .iter()
            .map(|s| s.momenta.len() as f64 * self.vhat(spin, s.ksq.sqrt()).powi(2))
            .sum();
        Ok(sum / self.l.powi(3))
    }

    /// Largest `|k|` where `û` is nonzero.
    pub fn uhat_extent(&self, spin: Spin) -> f64 {
        match self.kind {
            CutoffKind::Indicator => f64::INFINITY,
            CutoffKind::Smooth => 2.0 * self.rho[spin.index()].powf(-self.beta),
        }
    }

    /// Number of lattice momenta inside the support of `û` that the mode set lacks.
    pub fn missing_modes(&self, modes: &ModeSet) -> Result<usize> {
        let mut missing = 0;
        for s in Spin::BOTH {
            let ext = self.uhat_extent(s);
            if !ext.is_finite() {
                continue;
            }
            for shell in enumerate_shells(self.l, ext, crate::lattice::DEFAULT_POINT_LIMIT)? {
                for m in shell.momenta {
                    if self.uhat(s, m.norm()) > 0.0 && modes.find(m.n, s).is_none() {
                        missing += 1;
                    }
                }
            }
        }
        Ok(missing)
    }
}

/// `(ball mode, off-ball mode, û·v̂)` pairs with `n_off − n_ball = p` for one spin.
fn pairs(modes: &ModeSet, cut: &CutoffPair, spin: Spin, p: [i32; 3]) -> Vec<(usize, usize, f64)> {
    modes
        .indices(spin)
        .filter_map(|h| {
            let mh = modes.mode(h);
            let v = cut.vhat(spin, mh.momentum.norm());
            if v == 0.0 {
                return None;
            }
            let q = modes.find(add(mh.momentum.n, p), spin)?;
            let u = cut.uhat(spin, modes.mode(q).momentum.norm());
            (u != 0.0).then_some((h, q, u * v))
        })
        .collect()
}

/// Terms of `b̂_{p,σ} = Σ_k û(k+p) v̂(k) a_{k+p,σ} a_{k,σ}` over modes present.
pub fn pseudo_boson_terms(modes: &ModeSet, cut: &CutoffPair, p: [i32; 3], spin: Spin) -> Vec<Term> {
    pairs(modes, cut, spin, p)
        .into_iter()
        .map(|(h, q, w)| Term::new(w, vec![FermiOp::annihilate(q), FermiOp::annihilate(h)]))
        .collect()
}

/// `b̂_{p,σ}` as a matrix on the full Fock space (it changes particle number).
pub fn pseudo_boson(modes: &ModeSet, basis: &FockBasis, cut: &CutoffPair, p: [i32; 3], spin: Spin) -> SparseOperator {
    crate::fock::operator::build(basis, basis, &pseudo_boson_terms(modes, cut, p, spin)).0
}

/// `c_p = Σ_k (û(k+p) v̂(k))²`; for indicators, the number of ball momenta `k` with
/// `k+p` outside the ball and both modes present.
pub fn vacuum_commutator(modes: &ModeSet, cut: &CutoffPair, p: [i32; 3], spin: Spin) -> f64 {
    pairs(modes, cut, spin, p).iter().map(|t| t.2 * t.2).sum()
}

/// Largest pair weight `û(k+p) v̂(k)` for the given transfer.
pub fn max_pair_weight(modes: &ModeSet, cut: &CutoffPair, p: [i32; 3], spin: Spin) -> f64 {
    pairs(modes, cut, spin, p).iter().map(|t| t.2).fold(0.0, f64::max)
}

/// Momentum transfers `n_off − n_ball` realized by some pair of one spin.
pub fn transfers(modes: &ModeSet, spin: Spin) -> Vec<[i32; 3]> {
    let mut out: Vec<[i32; 3]> = Vec::new();
    for h in modes.indices(spin).filter(|&i| modes.mode(i).in_ball) {
        for q in modes.indices(spin).filter(|&i| !modes.mode(i).in_ball) {
            out.push(sub(modes.mode(q).momentum.n, modes.mode(h).momentum.n));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `L^{-3} Σ_p w(p) b̂_{p,↑} b̂_{−p,↓}`.
pub fn pair_terms(modes: &ModeSet, cut: &CutoffPair, weight: &dyn Fn([i32; 3]) -> f64) -> Vec<Term> {
    let l3 = modes.l.powi(3);
    let mut out = Vec::new();
    for p in transfers(modes, Spin::Up) {
        let w = weight(p);
        if w == 0.0 {
            continue;
        }
        let up = pairs(modes, cut, Spin::Up, p);
        let down = pairs(modes, cut, Spin::Down, neg(p));
        for &(h, q, wu) in &up {
            for &(hd, qd, wd) in &down {
                out.push(Term::new(
                    w * wu * wd / l3,
                    vec![
                        FermiOp::annihilate(q),
                        FermiOp::annihilate(h),
                        FermiOp::annihilate(qd),
                        FermiOp::annihilate(hd),
                    ],
                ));
            }
        }
    }
    out
}

/// Upper bound on `∫_{|x|>L/2} |φ|`: the part of `φ` that overlaps its periodic images.
pub fn aliasing_bound(sol: &ScatteringSolution, l: f64) -> f64 {
    let phi = sol.phi();
    let half = 0.5 * l;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (r, f) in sol.r.iter().zip(&phi) {
        if *r >= half {
            xs.push(*r);
            ys.push(4.0 * std::f64::consts::PI * r * r * f.abs());
        }
    }
    if xs.len() < 2 {
        return 0.0;
    }
    crate::numerics::simpson(&xs, &ys)
}

/// Pair operator `B` with the lattice-sampled transform of the zero-extended `φ`.
#[derive(Debug, Clone)]
pub struct PairOperator {
    pub operator: SparseOperator,
    /// Modes in the support of `û` missing from the set.
    pub missing_modes: usize,
    pub aliasing_bound: f64,
}

pub fn build_b(modes: &ModeSet, basis: &FockBasis, cut: &CutoffPair, phi: &ScatteringSolution) -> Result<PairOperator> {
    let scale = 2.0 * std::f64::consts::PI / modes.l;
    let weight = |p: [i32; 3]| {
        let n = (p.iter().map(|&c| (c as f64).powi(2)).sum::<f64>()).sqrt();
        phi.phi_hat(scale * n)
    };
    let terms = pair_terms(modes, cut, &weight);
    Ok(PairOperator {
        operator: crate::fock::operator::build(basis, basis, &terms).0,
        missing_modes: cut.missing_modes(modes)?,
        aliasing_bound: aliasing_bound(phi, modes.l),
    })
}

/// `Q̃4^r = L^{-3} Σ_p V̂(p) b̂_{p,↑} b̂_{−p,↓} + h.c.` with the kernel of `H`.
pub fn regularized_q4(
    modes: &ModeSet,
    basis: &FockBasis,
    kernel: &crate::fock::hamiltonian::PairKernel,
    cut: &CutoffPair,
) -> Result<SparseOperator> {
    let weight = |p: [i32; 3]| kernel.at(p);
    let mut terms = pair_terms(modes, cut, &weight);
    let adj: Vec<Term> = terms.iter().map(Term::adjoint).collect();
    terms.extend(adj);
    build_on(basis, &terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::Sector;
    use crate::fock::hamiltonian::{total_momentum, Frame, PairKernel};
    use crate::fock::wick::{Decomposition, DecompositionOptions, Part, SpinFilter};

    fn ms() -> ModeSet {
        ModeSet::with_extra(
            5.0,
            1,
            &[[1, 0, 0], [0, 1, 0], [-1, 0, 0]],
            1,
            &[[-1, 0, 0], [0, -1, 0], [1, 0, 0]],
            16,
        )
        .unwrap()
    }

    #[test]
    fn smooth_cutoff_plateaus() {
        let m = ModeSet::with_extra(2.0 * std::f64::consts::PI, 7, &[], 7, &[], 16).unwrap();
        let c = CutoffPair::smooth(&m, 2.0 / 3.0, 1.0 / 3.0).unwrap();
        let kf = c.kf[0];
        let w = c.rho[0].powf(2.0 / 3.0);
        let top = c.rho[0].powf(-1.0 / 3.0);
        assert_eq!(c.vhat(Spin::Up, 0.0), 1.0);
        assert_eq!(c.vhat(Spin::Up, kf - w - 1e-9), 1.0);
        assert_eq!(c.vhat(Spin::Up, kf), 0.0);
        assert_eq!(c.uhat(Spin::Up, kf), 0.0);
        assert_eq!(c.uhat(Spin::Up, 2.0 * kf), 1.0);
        assert_eq!(c.uhat(Spin::Up, 1.5 * top), 1.0);
        assert_eq!(c.uhat(Spin::Up, 2.0 * top), 0.0);
        let mid = c.vhat(Spin::Up, kf - 0.5 * w);
        assert!(mid > 0.0 && mid < 1.0);
        // only the origin lies strictly inside k_F − ρ^α
        let rr = c.regularized_density(Spin::Up).unwrap();
        assert!((rr - 1.0 / m.l.powi(3)).abs() < 1e-15);
        assert!(CutoffPair::smooth(&m, 2.0 / 3.0, 0.01).is_err());
    }

    #[test]
    fn vacuum_commutator_counts_pairs() {
        let m = ms();
        let full = FockBasis::build(&m, Sector::Full).unwrap();
        let cut = CutoffPair::indicator(&m);
        let omega = full.unit(0).unwrap();
        for p in [[1, 0, 0], [0, 1, 0], [2, 0, 0], [0, 0, 1]] {
            let b = pseudo_boson(&m, &full, &cut, p, Spin::Up);
            let c = b.commutator(&b.adjoint()).expectation(&omega).re;
            assert_eq!(c, vacuum_commutator(&m, &cut, p, Spin::Up));
            assert!(b.matvec(&omega).iter().all(|z| z.norm() == 0.0));
        }
        assert_eq!(vacuum_commutator(&m, &cut, [1, 0, 0], Spin::Up), 1.0);
        assert_eq!(vacuum_commutator(&m, &cut, [0, 0, 1], Spin::Up), 0.0);
        let b1 = pseudo_boson(&m, &full, &cut, [1, 0, 0], Spin::Up);
        let b2 = pseudo_boson(&m, &full, &cut, [0, 1, 0], Spin::Up);
        assert_eq!(b1.commutator(&b2).max_abs(), 0.0);
    }

    #[test]
    fn indicator_q4_is_opposite_spin_q4() {
        let m = ms();
        let full = FockBasis::build(&m, Sector::Full).unwrap();
        let kern = PairKernel::constant(m.l, m.max_distance_sq(), 1.3);
        let d = Decomposition::new(&m, &kern, DecompositionOptions::default()).unwrap();
        let q4 = d.operator(Part::Q4, SpinFilter::Opposite, &full).unwrap();
        let q4r = regularized_q4(&m, &full, &kern, &CutoffPair::indicator(&m)).unwrap();
        assert!(q4.max_abs() > 0.0);
        assert!(q4.sub(&q4r).max_abs() < 1e-15);
        let zero = PairKernel::constant(m.l, m.max_distance_sq(), 0.0);
        assert_eq!(
            regularized_q4(&m, &full, &zero, &CutoffPair::indicator(&m))
                .unwrap()
                .nnz(),
            0
        );
    }

    #[test]
    fn pair_operator_conserves_momentum_and_kills_vacuum() {
        let m = ms();
        let ph = FockBasis::particle_hole_image(&m, 1, 1).unwrap();
        let cut = CutoffPair::indicator(&m);
        let terms = pair_terms(&m, &cut, &|p| 1.5 + 0.1 * p[0] as f64);
        let b = crate::fock::operator::build(&ph, &ph, &terms).0;
        assert!(b.nnz() > 0);
        for axis in 0..3 {
            let p = total_momentum(&m, &ph, axis, Frame::ParticleHole);
            assert!(b.commutator(&p).max_abs() < 1e-15);
        }
        assert!(b.matvec(&ph.unit(0).unwrap()).iter().all(|z| z.norm() == 0.0));
        assert!(b.adjoint().matvec(&ph.unit(0).unwrap()).iter().any(|z| z.norm() > 0.0));
    }
}
