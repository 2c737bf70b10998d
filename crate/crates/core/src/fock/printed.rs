//! Position-space evaluation of the conjugated operators as written in closed form,
//! `∫∫ V(x−y) (field products)`, expressed in the momentum modes of the set.
//!
//! Fields expand as
//! `a(u_x) = L^{-3/2} Σ_{k∉B} e^{ikx} a_k`, `a*(u_x) = L^{-3/2} Σ_{k∉B} e^{−ikx} a*_k`,
//! `a*(v̄_x) = L^{-3/2} Σ_{k∈B} e^{ikx} a*_k`, `a(v̄_x) = L^{-3/2} Σ_{k∈B} e^{−ikx} a_k`,
//! and `ω(x;y) = L^{-3} Σ_{q∈B} e^{iq(x−y)}`. The double integral of
//! `V(x−y) e^{iK_x x} e^{iK_y y}` is `L³ V̂(K_y) δ(K_x + K_y)`.
//! These operators serve as a diagnostic against the normal-ordered decomposition.

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::hamiltonian::{add, nsq, sub, PairKernel};
use crate::fock::modes::ModeSet;
use crate::fock::operator::{build_on, FermiOp, SparseOperator, Term};
use crate::fock::wick::{Part, SpinFilter};
use crate::lattice::Spin;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    /// `a(u)`
    AnnU,
    /// `a*(u)`
    CreU,
    /// `a*(v̄)`
    CreV,
    /// `a(v̄)`
    AnnV,
}

impl Field {
    fn phase(self) -> i32 {
        match self {
            Field::AnnU | Field::CreV => 1,
            Field::CreU | Field::AnnV => -1,
        }
    }

    fn in_ball(self) -> bool {
        matches!(self, Field::CreV | Field::AnnV)
    }

    fn op(self, mode: usize) -> FermiOp {
        match self {
            Field::AnnU | Field::AnnV => FermiOp::annihilate(mode),
            Field::CreU | Field::CreV => FermiOp::create(mode),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Factor {
    pub field: Field,
    pub at_y: bool,
    pub primed: bool,
}

const fn f(field: Field, at_y: bool, primed: bool) -> Factor {
    Factor { field, at_y, primed }
}

/// `coeff Σ_σ [Σ_σ'] ∫∫ V(x−y) [ω_σ(x;y)] (factors) [+ h.c.]`.
#[derive(Debug, Clone)]
pub struct PrintedTerm {
    pub coeff: f64,
    pub factors: Vec<Factor>,
    pub omega: bool,
    pub both_spins: bool,
    pub hermitian_conjugate: bool,
}

use Field::*;

/// Which version of the closed-form expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// As written in the source formulas.
    AsPrinted,
    /// With the corrections found by comparison against normal ordering: `X` carries the
    /// opposite overall sign, the second `Q2` term has `a(v̄_y)` in place of `a(v̄_x)`,
    /// and the first `Q2` term has weight 1 instead of 1/2.
    Corrected,
}

/// The closed-form expression of one part.
pub fn formula(part: Part, variant: Variant) -> Result<Vec<PrintedTerm>> {
    let fixed = variant == Variant::Corrected;
    let x_sign = if fixed { -1.0 } else { 1.0 };
    let t = |coeff, factors: Vec<Factor>, omega, both_spins, hc| PrintedTerm {
        coeff,
        factors,
        omega,
        both_spins,
        hermitian_conjugate: hc,
    };
    let (x, y) = (false, true);
    let (s, p) = (false, true);
    Ok(match part {
        Part::X => vec![
            t(x_sign, vec![f(CreU, x, s), f(AnnU, y, s)], true, false, false),
            t(-x_sign, vec![f(CreV, y, s), f(AnnV, x, s)], true, false, false),
        ],
        Part::Q1 => vec![t(
            0.5,
            vec![f(CreU, x, s), f(CreU, y, p), f(AnnU, y, p), f(AnnU, x, s)],
            false,
            true,
            false,
        )],
        Part::Q2 => vec![
            t(
                if fixed { 1.0 } else { 0.5 },
                vec![f(CreU, x, s), f(CreV, x, s), f(AnnV, y, p), f(AnnU, y, p)],
                false,
                true,
                false,
            ),
            t(
                -1.0,
                vec![
                    f(CreU, x, s),
                    f(CreV, y, p),
                    f(AnnV, if fixed { y } else { x }, p),
                    f(AnnU, x, s),
                ],
                false,
                true,
                false,
            ),
            t(
                0.5,
                vec![f(CreV, y, p), f(CreV, x, s), f(AnnV, x, s), f(AnnV, y, p)],
                false,
                true,
                false,
            ),
        ],
        Part::Q3 => vec![
            t(
                -1.0,
                vec![f(CreU, x, s), f(CreU, y, p), f(CreV, x, s), f(AnnU, y, p)],
                false,
                true,
                true,
            ),
            t(
                1.0,
                vec![f(CreU, x, s), f(CreV, y, p), f(CreV, x, s), f(AnnV, y, p)],
                false,
                true,
                true,
            ),
        ],
        Part::Q4 => vec![t(
            0.5,
            vec![f(CreU, x, s), f(CreU, y, p), f(CreV, y, p), f(CreV, x, s)],
            false,
            true,
            true,
        )],
        other => return Err(Error::InvalidInput(format!("no closed-form expression for {other:?}"))),
    })
}

/// Kernel range needed by [`printed_operator`].
pub fn required_kernel_nsq(modes: &ModeSet) -> i64 {
    4 * modes.modes().iter().map(|m| m.momentum.nsq()).max().unwrap_or(0)
}

fn expand(term: &PrintedTerm, modes: &ModeSet, kernel: &PairKernel, filter: SpinFilter, out: &mut Vec<Term>) {
    let l3 = modes.l.powi(3);
    let nf = term.factors.len() as i32;
    let scale = term.coeff * l3 * l3.powf(-0.5 * nf as f64) * if term.omega { 1.0 / l3 } else { 1.0 };
    for s in Spin::BOTH {
        let primes: Vec<Spin> = if term.both_spins { Spin::BOTH.to_vec() } else { vec![s] };
        for sp in primes {
            let admitted = match filter {
                SpinFilter::All => true,
                SpinFilter::Opposite => s != sp,
                SpinFilter::Equal => s == sp,
            };
            if !admitted {
                continue;
            }
            let choices: Vec<Vec<usize>> = term
                .factors
                .iter()
                .map(|fa| {
                    let spin = if fa.primed { sp } else { s };
                    modes
                        .indices(spin)
                        .filter(|&i| modes.mode(i).in_ball == fa.field.in_ball())
                        .collect()
                })
                .collect();
            let total: usize = choices.iter().map(Vec::len).product();
            for combo in 0..total {
                let mut rest = combo;
                let mut kx = [0i32; 3];
                let mut ky = [0i32; 3];
                let mut ops = Vec::with_capacity(choices.len());
                for (fa, choice) in term.factors.iter().zip(&choices) {
                    let mode = choice[rest % choice.len()];
                    rest /= choice.len();
                    let signed = modes.mode(mode).momentum.n.map(|c| c * fa.field.phase());
                    if fa.at_y {
                        ky = add(ky, signed);
                    } else {
                        kx = add(kx, signed);
                    }
                    ops.push(fa.field.op(mode));
                }
                if add(kx, ky) != [0, 0, 0] {
                    continue;
                }
                let w = if term.omega {
                    // ω_σ(x;y) shifts K_y by −q
                    modes
                        .ball(s)
                        .momenta
                        .iter()
                        .map(|q| kernel.at_nsq(nsq(sub(ky, q.n))))
                        .sum::<f64>()
                } else {
                    kernel.at_nsq(nsq(ky))
                };
                let t = Term::new(scale * w, ops);
                if term.hermitian_conjugate {
                    out.push(t.adjoint());
                }
                out.push(t);
            }
        }
    }
}

/// The closed-form expression of `part` as a matrix on `basis`.
pub fn printed_operator(
    part: Part,
    variant: Variant,
    modes: &ModeSet,
    kernel: &PairKernel,
    filter: SpinFilter,
    basis: &FockBasis,
) -> Result<SparseOperator> {
    if kernel.max_nsq() < required_kernel_nsq(modes) {
        return Err(Error::InvalidInput(
            "pair kernel table too short for the closed-form terms".into(),
        ));
    }
    let mut terms = Vec::new();
    for t in formula(part, variant)? {
        expand(&t, modes, kernel, filter, &mut terms);
    }
    build_on(basis, &terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::Sector;
    use crate::fock::wick::{Decomposition, DecompositionOptions};
    use crate::potential::{FourierPotential, RadialPotential};

    #[test]
    fn corrected_forms_match_normal_ordering() {
        let ms = ModeSet::with_extra(
            4.0,
            7,
            &[[1, 1, 0]],
            1,
            &[[1, 0, 0], [-1, 0, 0], [0, -1, 0], [1, 1, 0]],
            16,
        )
        .unwrap();
        let v = FourierPotential::new(RadialPotential::Bump { v0: 3.0, r0: 1.2 });
        let kern = PairKernel::from_fn(ms.l, required_kernel_nsq(&ms), |p| v.at(p)).unwrap();
        let d = Decomposition::new(&ms, &kern, DecompositionOptions::default()).unwrap();
        let full = FockBasis::build(&ms, Sector::Full).unwrap();
        for part in [Part::X, Part::Q1, Part::Q2, Part::Q3, Part::Q4] {
            let w = d.operator(part, SpinFilter::All, &full).unwrap();
            assert!(w.max_abs() > 0.0, "{part:?} is empty in this mode set");
            let fixed = printed_operator(part, Variant::Corrected, &ms, &kern, SpinFilter::All, &full).unwrap();
            assert!(fixed.sub(&w).max_abs() < 1e-13, "{part:?}");
            let raw = printed_operator(part, Variant::AsPrinted, &ms, &kern, SpinFilter::All, &full).unwrap();
            let dev = raw.sub(&w).max_abs();
            if matches!(part, Part::X | Part::Q2) {
                assert!(dev > 1e-3, "{part:?}");
            } else {
                assert!(dev < 1e-13, "{part:?}");
            }
        }
        let xp = printed_operator(Part::X, Variant::AsPrinted, &ms, &kern, SpinFilter::All, &full).unwrap();
        let xw = d.operator(Part::X, SpinFilter::All, &full).unwrap();
        assert!(xp.add(&xw).max_abs() < 1e-13);
    }

    #[test]
    fn opposite_spin_filter_matches_tilde_operators() {
        let ms = ModeSet::with_extra(4.0, 1, &[[1, 0, 0], [0, 1, 0]], 1, &[[-1, 0, 0], [0, -1, 0]], 16).unwrap();
        let kern = PairKernel::constant(ms.l, required_kernel_nsq(&ms), 0.7);
        let d = Decomposition::new(&ms, &kern, DecompositionOptions::default()).unwrap();
        let full = FockBasis::build(&ms, Sector::Full).unwrap();
        for part in [Part::Q1, Part::Q2, Part::Q3, Part::Q4] {
            let w = d.operator(part, SpinFilter::Opposite, &full).unwrap();
            let p = printed_operator(part, Variant::Corrected, &ms, &kern, SpinFilter::Opposite, &full).unwrap();
            assert!(p.sub(&w).max_abs() < 1e-13, "{part:?}");
        }
        assert!(formula(Part::H0, Variant::AsPrinted).is_err());
    }
}
