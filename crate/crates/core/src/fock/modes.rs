use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_shells, fermi_ball, FermiBall, Momentum, Spin};

/// Default ceiling on the number of spin-orbitals in a mode set.
pub const DEFAULT_MAX_MODES: usize = 16;
/// Bitstrings are `u32`.
pub const HARD_MAX_MODES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub momentum: Momentum,
    pub spin: Spin,
    /// `k ∈ B_F^σ`.
    pub in_ball: bool,
}

/// Ordered list of spin-orbitals with Fermi-ball membership.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub l: f64,
    modes: Vec<Mode>,
    balls: [FermiBall; 2],
    index: HashMap<([i32; 3], Spin), usize>,
}

impl ModeSet {
    /// Builds a mode set from explicit momentum lists per spin. Each Fermi ball must be
    /// contained in its spin's momentum list.
    pub fn new(
        l: f64,
        up: &[[i32; 3]],
        down: &[[i32; 3]],
        ball_up: FermiBall,
        ball_down: FermiBall,
        max_modes: usize,
    ) -> Result<Self> {
        let total = up.len() + down.len();
        if total > max_modes.min(HARD_MAX_MODES) {
            return Err(Error::Capacity {
                what: "spin-orbitals",
                requested: total,
                limit: max_modes.min(HARD_MAX_MODES),
            });
        }
        if ball_up.spin != Spin::Up || ball_down.spin != Spin::Down {
            return Err(Error::InvalidInput("balls must be given as (up, down)".into()));
        }
        if ball_up.l != l || ball_down.l != l {
            return Err(Error::InvalidInput("Fermi balls live on a different box".into()));
        }
        let mut modes = Vec::with_capacity(total);
        for (spin, list, ball) in [(Spin::Up, up, &ball_up), (Spin::Down, down, &ball_down)] {
            let mut ns = list.to_vec();
            ns.sort();
            if ns.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("duplicate momentum for spin {spin:?}")));
            }
            for m in &ball.momenta {
                if ns.binary_search(&m.n).is_err() {
                    return Err(Error::InvalidInput(format!(
                        "Fermi ball momentum {:?} (spin {spin:?}) missing from the mode set",
                        m.n
                    )));
                }
            }
            modes.extend(ns.into_iter().map(|n| Mode {
                momentum: Momentum::new(n, l),
                spin,
                in_ball: ball.contains(n),
            }));
        }
        let index = modes
            .iter()
            .enumerate()
            .map(|(i, m)| ((m.momentum.n, m.spin), i))
            .collect();
        Ok(ModeSet {
            l,
            modes,
            balls: [ball_up, ball_down],
            index,
        })
    }

    /// Filled balls of `n_up`, `n_down` momenta plus every lattice momentum with
    /// `|n|² ≤ nsq_up` (resp. `nsq_down`).
    pub fn from_shells(
        l: f64,
        n_up: usize,
        nsq_up: i64,
        n_down: usize,
        nsq_down: i64,
        max_modes: usize,
    ) -> Result<Self> {
        let bu = fermi_ball(l, n_up, Spin::Up)?;
        let bd = fermi_ball(l, n_down, Spin::Down)?;
        let shell_list = |nsq: i64| -> Result<Vec<[i32; 3]>> {
            let kmax = (nsq as f64).sqrt() * 2.0 * std::f64::consts::PI / l;
            Ok(enumerate_shells(l, kmax, 1 << 20)?
                .into_iter()
                .filter(|s| s.nsq <= nsq)
                .flat_map(|s| s.momenta.into_iter().map(|m| m.n))
                .collect())
        };
        let up = shell_list(nsq_up.max(bu.nsq_max))?;
        let down = shell_list(nsq_down.max(bd.nsq_max))?;
        ModeSet::new(l, &up, &down, bu, bd, max_modes)
    }

    /// Filled balls plus explicitly listed extra momenta per spin.
    pub fn with_extra(
        l: f64,
        n_up: usize,
        extra_up: &[[i32; 3]],
        n_down: usize,
        extra_down: &[[i32; 3]],
        max_modes: usize,
    ) -> Result<Self> {
        let bu = fermi_ball(l, n_up, Spin::Up)?;
        let bd = fermi_ball(l, n_down, Spin::Down)?;
        let mut up: Vec<[i32; 3]> = bu.momenta.iter().map(|m| m.n).collect();
        up.extend_from_slice(extra_up);
        let mut down: Vec<[i32; 3]> = bd.momenta.iter().map(|m| m.n).collect();
        down.extend_from_slice(extra_down);
        ModeSet::new(l, &up, &down, bu, bd, max_modes)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode(&self, i: usize) -> &Mode {
        &self.modes[i]
    }

    pub fn find(&self, n: [i32; 3], spin: Spin) -> Option<usize> {
        self.index.get(&(n, spin)).copied()
    }

    pub fn ball(&self, spin: Spin) -> &FermiBall {
        &self.balls[spin.index()]
    }

    pub fn balls(&self) -> &[FermiBall; 2] {
        &self.balls
    }

    /// `(k_F^σ)²`, the largest occupied `|k|²` of the ball.
    pub fn kf_sq(&self, spin: Spin) -> f64 {
        let b = self.ball(spin);
        b.kf * b.kf
    }

    pub fn indices(&self, spin: Spin) -> impl Iterator<Item = usize> + '_ {
        self.modes
            .iter()
            .enumerate()
            .filter(move |(_, m)| m.spin == spin)
            .map(|(i, _)| i)
    }

    /// Bitmask of modes of one spin.
    pub fn spin_mask(&self, spin: Spin) -> u32 {
        self.mask(|m| m.spin == spin)
    }

    /// Bitmask of all Fermi-ball modes.
    pub fn ball_mask(&self) -> u32 {
        self.mask(|m| m.in_ball)
    }

    pub fn mask(&self, pred: impl Fn(&Mode) -> bool) -> u32 {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| pred(m))
            .fold(0u32, |acc, (i, _)| acc | 1 << i)
    }

    /// Largest `|n − n'|²` between two modes of the set.
    pub fn max_distance_sq(&self) -> i64 {
        let mut best = 0;
        for a in &self.modes {
            for b in &self.modes {
                let d: i64 = (0..3)
                    .map(|i| ((a.momentum.n[i] - b.momentum.n[i]) as i64).pow(2))
                    .sum();
                best = best.max(d);
            }
        }
        best
    }

    /// Human-readable description, stable across runs; used for basis hashes.
    pub fn descriptor(&self) -> String {
        let mut s = format!("L={:.17e};", self.l);
        for m in &self.modes {
            s.push_str(&format!(
                "{:?}{:?}{};",
                m.spin,
                m.momentum.n,
                if m.in_ball { "B" } else { "" }
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ordering_is_spin_major_then_lexicographic() {
        let ms = ModeSet::from_shells(2.0 * PI, 1, 1, 1, 0, 16).unwrap();
        assert_eq!(ms.len(), 8);
        assert!(ms.modes()[..7].iter().all(|m| m.spin == Spin::Up));
        let ns: Vec<_> = ms.modes()[..7].iter().map(|m| m.momentum.n).collect();
        let mut sorted = ns.clone();
        sorted.sort();
        assert_eq!(ns, sorted);
        assert_eq!(ms.ball_mask().count_ones(), 2);
        assert_eq!(ms.find([0, 0, 0], Spin::Down), Some(7));
    }

    #[test]
    fn capacity_and_missing_ball() {
        assert!(matches!(
            ModeSet::from_shells(2.0 * PI, 7, 2, 7, 2, 16),
            Err(Error::Capacity { .. })
        ));
        let bu = fermi_ball(1.0, 7, Spin::Up).unwrap();
        let bd = fermi_ball(1.0, 1, Spin::Down).unwrap();
        assert!(ModeSet::new(1.0, &[[0, 0, 0]], &[[0, 0, 0]], bu, bd, 16).is_err());
    }
}
