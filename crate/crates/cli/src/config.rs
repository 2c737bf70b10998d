//! Run configuration: TOML with one level of sections. Unknown keys are rejected and every
//! value is validated before a command runs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use dilute_fermi::potential::DEFAULT_FOURIER_TOL;
use dilute_fermi::{NeumannConfig, RadialPotential};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub run: RunSection,
    pub potential: PotentialSection,
    pub hf: Option<HfSection>,
    pub scatter: Option<ScatterSection>,
    pub asympt: Option<AsymptSection>,
    /// Mode set of the second-quantization checks.
    #[serde(default = "ModesSection::main")]
    pub modes: ModesSection,
    /// Mode set of the equal-spin discard check.
    #[serde(default = "ModesSection::discard")]
    pub discard: ModesSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    SoftSphere,
    #[default]
    Bump,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub kind: PotentialKind,
    pub v0: f64,
    pub r0: f64,
    #[serde(default = "default_fourier_tol")]
    pub fourier_tol: f64,
}

impl Default for PotentialSection {
    fn default() -> Self {
        PotentialSection {
            kind: PotentialKind::Bump,
            v0: 1.0,
            r0: 1.0,
            fourier_tol: DEFAULT_FOURIER_TOL,
        }
    }
}

impl PotentialSection {
    pub fn radial(&self) -> RadialPotential {
        match self.kind {
            PotentialKind::SoftSphere => RadialPotential::SoftSphere {
                v0: self.v0,
                r0: self.r0,
            },
            PotentialKind::Bump => RadialPotential::Bump {
                v0: self.v0,
                r0: self.r0,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HfSection {
    /// Box sizes, one table row each.
    pub l: Vec<f64>,
    pub n_up: Option<usize>,
    pub n_down: Option<usize>,
    /// Target densities; the count used is the nearest admissible one below `ρ L³`.
    pub rho_up: Option<f64>,
    pub rho_down: Option<f64>,
    /// Replace an incomplete-shell count by the nearest admissible one below.
    #[serde(default)]
    pub auto_snap: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterSection {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub densities: Vec<f64>,
    pub inner_steps: Option<usize>,
    pub outer_samples: Option<usize>,
    pub window_factor: Option<f64>,
    pub tol: Option<f64>,
}

impl ScatterSection {
    pub fn neumann(&self) -> NeumannConfig {
        let d = NeumannConfig::default();
        NeumannConfig {
            inner_steps: self.inner_steps.unwrap_or(d.inner_steps),
            outer_samples: self.outer_samples.unwrap_or(d.outer_samples),
            window_factor: self.window_factor.unwrap_or(d.window_factor),
            tol: self.tol.unwrap_or(d.tol),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptSection {
    /// Total densities `ρ`, split as `(f ρ, (1 − f) ρ)` with `f = up_fraction`.
    #[serde(default)]
    pub densities: Vec<f64>,
    #[serde(default = "default_half")]
    pub up_fraction: f64,
    /// Explicit `(ρ↑, ρ↓)` rows, appended after the `densities` rows.
    #[serde(default)]
    pub pairs: Vec<[f64; 2]>,
    /// Scattering length; computed from the potential when absent.
    pub a: Option<f64>,
    #[serde(default = "default_one")]
    pub envelope_c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesSection {
    pub l: f64,
    pub n_up: usize,
    pub n_down: usize,
    #[serde(default)]
    pub extra_up: Vec<[i32; 3]>,
    #[serde(default)]
    pub extra_down: Vec<[i32; 3]>,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
}

impl ModesSection {
    /// Both balls of 7 with one hole shell each: 16 modes, 64 states per sector.
    pub fn main() -> Self {
        ModesSection {
            l: 4.0,
            n_up: 7,
            n_down: 7,
            extra_up: vec![[1, 1, 0]],
            extra_down: vec![[-1, -1, 0]],
            max_modes: 16,
        }
    }

    /// 11 spin-orbitals.
    pub fn discard() -> Self {
        ModesSection {
            l: 4.0,
            n_up: 7,
            n_down: 1,
            extra_up: vec![[1, 1, 0]],
            extra_down: vec![[1, 0, 0], [-1, 0, 0]],
            max_modes: 16,
        }
    }

    pub fn mode_set(&self) -> dilute_fermi::Result<dilute_fermi::ModeSet> {
        dilute_fermi::ModeSet::with_extra(
            self.l,
            self.n_up,
            &self.extra_up,
            self.n_down,
            &self.extra_down,
            self.max_modes,
        )
    }

    /// The filled balls alone.
    pub fn sea_only(&self) -> dilute_fermi::Result<dilute_fermi::ModeSet> {
        dilute_fermi::ModeSet::with_extra(self.l, self.n_up, &[], self.n_down, &[], self.max_modes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffChoice {
    #[default]
    Indicator,
    Smooth,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Random sector states for the decomposition identity.
    pub draws: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub cutoff: CutoffChoice,
    /// `λ` grid of the unitarity and propagation checks.
    pub lambdas: Vec<f64>,
    pub duhamel_lambda: f64,
    /// Finite-difference step; the `O(h²)` test compares `h` and `h/2`.
    pub duhamel_h: f64,
    pub slack: f64,
    pub ground_state_c: f64,
    /// Largest `|p|²` (integer units) of the vacuum commutator sweep.
    pub sweep_nsq: i64,
    /// Largest number of occupied modes in the near-bosonicity blocks.
    pub bosonicity_excitations: u32,
    /// Negative-control hook: flips the sign of the exchange contractions.
    pub corrupt_exchange_sign: bool,
    pub fermi_sea_tol: f64,
    pub decomposition_tol: f64,
    pub discard_tol: f64,
    pub identity_tol: f64,
    pub unitarity_tol: f64,
    pub group_tol: f64,
    pub duhamel_ratio_tol: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            draws: 20,
            gamma: default_gamma(),
            alpha: 2.0 / 3.0,
            beta: 0.5,
            cutoff: CutoffChoice::Indicator,
            lambdas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            duhamel_lambda: 0.5,
            duhamel_h: 1e-2,
            slack: 1.0,
            ground_state_c: 1.0,
            sweep_nsq: 3,
            bosonicity_excitations: 2,
            corrupt_exchange_sign: false,
            fermi_sea_tol: 1e-10,
            decomposition_tol: 1e-9,
            discard_tol: 1e-10,
            identity_tol: 1e-12,
            unitarity_tol: 1e-12,
            group_tol: 1e-10,
            duhamel_ratio_tol: 0.2,
        }
    }
}

fn default_gamma() -> f64 {
    1.0 / 3.0
}

fn default_half() -> f64 {
    0.5
}

fn default_one() -> f64 {
    1.0
}

fn default_fourier_tol() -> f64 {
    DEFAULT_FOURIER_TOL
}

fn default_max_modes() -> usize {
    dilute_fermi::fock::modes::DEFAULT_MAX_MODES
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be a positive finite number, got {x}")))
    }
}

fn nonnegative(field: &str, x: f64) -> Result<(), CliError> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be a nonnegative finite number, got {x}")))
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.potential;
        nonnegative("potential.v0", p.v0)?;
        positive("potential.r0", p.r0)?;
        positive("potential.fourier_tol", p.fourier_tol)?;
        if let Some(h) = &self.hf {
            if h.l.is_empty() {
                return Err(invalid("hf.l", "needs at least one box size"));
            }
            for &l in &h.l {
                positive("hf.l", l)?;
            }
            for (spin, n, rho) in [("up", h.n_up, h.rho_up), ("down", h.n_down, h.rho_down)] {
                match (n, rho) {
                    (Some(_), Some(_)) => {
                        return Err(invalid(
                            &format!("hf.n_{spin}"),
                            format!("conflicts with hf.rho_{spin}"),
                        ))
                    }
                    (None, None) => {
                        return Err(invalid(
                            &format!("hf.n_{spin}"),
                            format!("either n_{spin} or rho_{spin} is required"),
                        ))
                    }
                    (None, Some(r)) => positive(&format!("hf.rho_{spin}"), r)?,
                    (Some(_), None) => {}
                }
            }
        }
        if let Some(s) = &self.scatter {
            positive("scatter.gamma", s.gamma)?;
            if s.densities.is_empty() {
                return Err(invalid("scatter.densities", "needs at least one density"));
            }
            for &r in &s.densities {
                positive("scatter.densities", r)?;
            }
            let n = s.neumann();
            if n.inner_steps < 10 || n.outer_samples < 10 {
                return Err(invalid("scatter.inner_steps", "step counts must be at least 10"));
            }
            positive("scatter.window_factor", n.window_factor)?;
            positive("scatter.tol", n.tol)?;
        }
        if let Some(a) = &self.asympt {
            if a.densities.is_empty() && a.pairs.is_empty() {
                return Err(invalid("asympt.densities", "needs densities or pairs"));
            }
            for &r in &a.densities {
                positive("asympt.densities", r)?;
            }
            for pair in &a.pairs {
                nonnegative("asympt.pairs", pair[0])?;
                nonnegative("asympt.pairs", pair[1])?;
                if pair[0] + pair[1] <= 0.0 {
                    return Err(invalid("asympt.pairs", "total density must be positive"));
                }
            }
            if !(0.0..=1.0).contains(&a.up_fraction) {
                return Err(invalid(
                    "asympt.up_fraction",
                    format!("must lie in [0, 1], got {}", a.up_fraction),
                ));
            }
            if let Some(x) = a.a {
                nonnegative("asympt.a", x)?;
            }
            nonnegative("asympt.envelope_c", a.envelope_c)?;
        }
        for (name, m) in [("modes", &self.modes), ("discard", &self.discard)] {
            positive(&format!("{name}.l"), m.l)?;
            if m.n_up == 0 || m.n_down == 0 {
                return Err(invalid(&format!("{name}.n_up"), "both balls must be nonempty"));
            }
        }
        let v = &self.verify;
        if v.draws == 0 {
            return Err(invalid("verify.draws", "must be at least 1"));
        }
        positive("verify.gamma", v.gamma)?;
        positive("verify.alpha", v.alpha)?;
        positive("verify.beta", v.beta)?;
        if v.lambdas.iter().any(|x| !x.is_finite()) || v.lambdas.is_empty() {
            return Err(invalid("verify.lambdas", "needs finite values"));
        }
        if !v.duhamel_lambda.is_finite() {
            return Err(invalid("verify.duhamel_lambda", "must be finite"));
        }
        positive("verify.duhamel_h", v.duhamel_h)?;
        nonnegative("verify.slack", v.slack)?;
        nonnegative("verify.ground_state_c", v.ground_state_c)?;
        if v.sweep_nsq < 0 {
            return Err(invalid("verify.sweep_nsq", "must be ≥ 0"));
        }
        for (f, x) in [
            ("verify.fermi_sea_tol", v.fermi_sea_tol),
            ("verify.decomposition_tol", v.decomposition_tol),
            ("verify.discard_tol", v.discard_tol),
            ("verify.identity_tol", v.identity_tol),
            ("verify.unitarity_tol", v.unitarity_tol),
            ("verify.group_tol", v.group_tol),
            ("verify.duhamel_ratio_tol", v.duhamel_ratio_tol),
        ] {
            positive(f, x)?;
        }
        Ok(())
    }
}
