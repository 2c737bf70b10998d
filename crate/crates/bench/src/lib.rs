//! Fixtures shared by the benchmarks in `benches/`.

use dilute_fermi::lattice::fermi_ball;
use dilute_fermi::{FermiBall, FourierPotential, ModeSet, RadialPotential, Spin};

pub fn potential() -> RadialPotential {
    RadialPotential::Bump { v0: 1.0, r0: 1.0 }
}

pub fn fourier() -> FourierPotential {
    FourierPotential::new(potential())
}

/// Two equal balls of `n` momenta on a box of side `l`.
pub fn balls(l: f64, n: usize) -> Vec<FermiBall> {
    vec![
        fermi_ball(l, n, Spin::Up).expect("admissible"),
        fermi_ball(l, n, Spin::Down).expect("admissible"),
    ]
}

/// Balls of 7 with one hole shell per spin: 16 modes.
pub fn modes() -> ModeSet {
    ModeSet::with_extra(4.0, 7, &[[1, 1, 0]], 7, &[[-1, -1, 0]], 16).expect("mode set")
}
