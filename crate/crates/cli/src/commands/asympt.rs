//! Closed-form energy densities at the configured densities.

use dilute_fermi::asymptotics::{error_envelope, free_density, hy_term, interaction_density, AsymptoticInput};
use dilute_fermi::scattering::scattering_length;
use dilute_fermi::NeumannConfig;

use crate::config::Config;
use crate::error::CliError;
use crate::output::{num, Table};

pub const COLUMNS: [&str; 10] = [
    "rho_up",
    "rho_down",
    "a",
    "free",
    "interaction",
    "hy",
    "lss_density",
    "envelope_lower",
    "envelope_upper",
    "hy_over_interaction",
];

pub fn run(cfg: &Config, hash: &str) -> Result<String, CliError> {
    let s = cfg
        .asympt
        .as_ref()
        .ok_or_else(|| CliError::Config("asympt: section missing".into()))?;
    let a = match s.a {
        Some(a) => a,
        None => scattering_length(&cfg.potential.radial(), NeumannConfig::default().inner_steps)?,
    };
    let mut pairs: Vec<[f64; 2]> = s
        .densities
        .iter()
        .map(|&r| [s.up_fraction * r, (1.0 - s.up_fraction) * r])
        .collect();
    pairs.extend_from_slice(&s.pairs);
    let mut table = Table::new("asympt", hash, &COLUMNS);
    for [ru, rd] in pairs {
        let inp = AsymptoticInput::new(ru, rd, a)?;
        let free = free_density(ru, rd);
        let int = interaction_density(&inp);
        let hy = hy_term(&inp);
        let (lo, hi) = error_envelope(inp.rho(), s.envelope_c)?;
        let ratio = if int > 0.0 { num(hy / int) } else { "nan".into() };
        table.row(&[
            num(ru),
            num(rd),
            num(a),
            num(free),
            num(int),
            num(hy),
            num(free + int),
            num(lo),
            num(hi),
            ratio,
        ]);
    }
    Ok(table.into_string())
}
