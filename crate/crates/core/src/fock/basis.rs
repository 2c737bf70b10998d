use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fock::modes::ModeSet;
use crate::lattice::Spin;

/// Sector restriction of the occupation basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sector {
    /// All `2^M` bitstrings.
    Full,
    /// Fixed particle numbers `(N↑, N↓)`.
    Number { up: usize, down: usize },
    /// Fixed particle-hole charge per spin: occupied off-ball modes minus occupied ball
    /// modes. The image of the `(N↑, N↓)` sector under `R*` has charge
    /// `N_σ − |B_F^σ|`.
    ParticleHole { up: i64, down: i64 },
    /// At most `max` occupied modes, any spin.
    Occupied { max: u32 },
}

/// Restriction to one total-momentum eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MomentumBlock {
    pub total: [i32; 3],
    /// Count ball modes with `−k` (holes) rather than `+k`.
    pub ph_frame: bool,
}

/// Occupation-number basis, ordered by bitstring value.
#[derive(Debug, Clone)]
pub struct FockBasis {
    pub mode_count: usize,
    pub sector: Sector,
    /// Total-momentum restriction (integer units, particle-hole frame when `ph_frame`).
    pub momentum: Option<MomentumBlock>,
    states: Vec<u32>,
    hash: String,
}

impl FockBasis {
    pub fn build(modes: &ModeSet, sector: Sector) -> Result<Self> {
        FockBasis::build_block(modes, sector, None)
    }

    /// A sector further restricted to one total-momentum block.
    pub fn build_block(modes: &ModeSet, sector: Sector, momentum: Option<MomentumBlock>) -> Result<Self> {
        let m = modes.len();
        let total: u64 = 1u64 << m;
        let up = modes.spin_mask(Spin::Up);
        let down = modes.spin_mask(Spin::Down);
        let ball = modes.ball_mask();
        let charge = |s: u32, mask: u32| -> i64 {
            (s & mask & !ball).count_ones() as i64 - (s & mask & ball).count_ones() as i64
        };
        let mut states: Vec<u32> = match sector {
            Sector::Full => (0..total as u32).collect(),
            Sector::Number { up: nu, down: nd } => (0..total as u32)
                .filter(|&s| (s & up).count_ones() as usize == nu && (s & down).count_ones() as usize == nd)
                .collect(),
            Sector::ParticleHole { up: cu, down: cd } => (0..total as u32)
                .filter(|&s| charge(s, up) == cu && charge(s, down) == cd)
                .collect(),
            Sector::Occupied { max } => (0..total as u32).filter(|&s| s.count_ones() <= max).collect(),
        };
        if let Some(block) = momentum {
            let total = |s: u32| -> [i32; 3] {
                let mut t = [0i32; 3];
                for (i, mode) in modes.modes().iter().enumerate() {
                    if s & (1 << i) != 0 {
                        let sign = if block.ph_frame && mode.in_ball { -1 } else { 1 };
                        for (ta, na) in t.iter_mut().zip(mode.momentum.n) {
                            *ta += sign * na;
                        }
                    }
                }
                t
            };
            states.retain(|&s| total(s) == block.total);
        }
        if states.is_empty() {
            let (u, d) = match sector {
                Sector::Number { up, down } => (up as i64, down as i64),
                Sector::ParticleHole { up, down } => (up, down),
                Sector::Full | Sector::Occupied { .. } => (0, 0),
            };
            return Err(Error::EmptySector { up: u, down: d });
        }
        let mut h = Sha256::new();
        h.update(modes.descriptor().as_bytes());
        h.update(format!("{sector:?}{momentum:?}").as_bytes());
        let hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(FockBasis {
            mode_count: m,
            sector,
            momentum,
            states,
            hash,
        })
    }

    /// The basis `R*` maps the `(N↑, N↓)` sector onto.
    pub fn particle_hole_image(modes: &ModeSet, n_up: usize, n_down: usize) -> Result<Self> {
        let cu = n_up as i64 - modes.ball(Spin::Up).n() as i64;
        let cd = n_down as i64 - modes.ball(Spin::Down).n() as i64;
        FockBasis::build(modes, Sector::ParticleHole { up: cu, down: cd })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn state(&self, i: usize) -> u32 {
        self.states[i]
    }

    pub fn index_of(&self, s: u32) -> Option<usize> {
        match self.sector {
            Sector::Full if self.momentum.is_none() => ((s as usize) < self.states.len()).then_some(s as usize),
            _ => self.states.binary_search(&s).ok(),
        }
    }

    /// SHA-256 of the mode-set descriptor and sector.
    pub fn descriptor_hash(&self) -> &str {
        &self.hash
    }

    /// Basis vector of a bitstring.
    pub fn unit(&self, s: u32) -> Option<Vec<num_complex::Complex64>> {
        let i = self.index_of(s)?;
        let mut v = vec![num_complex::Complex64::new(0.0, 0.0); self.dim()];
        v[i] = num_complex::Complex64::new(1.0, 0.0);
        Some(v)
    }
}
