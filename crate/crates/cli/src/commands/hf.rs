//! Hartree-Fock table: one row per box size.

use rayon::prelude::*;

use dilute_fermi::hf::{hf_density, hf_energy, kinetic_density_error};
use dilute_fermi::lattice::{admissible_below, fermi_ball};
use dilute_fermi::{Error, FourierPotential, Spin};

use crate::config::{Config, HfSection};
use crate::error::CliError;
use crate::output::{num, Table};

pub const COLUMNS: [&str; 14] = [
    "L",
    "N_up",
    "N_down",
    "rho_up",
    "rho_down",
    "kinetic",
    "direct",
    "exchange",
    "total",
    "kinetic_density",
    "interaction_density",
    "total_density",
    "kinetic_density_error",
    "taylor_residual",
];

/// Particle count at box size `l`, with a notice when it differs from the request.
fn count(h: &HfSection, l: f64, spin: Spin) -> Result<(usize, Option<String>), CliError> {
    let (n, rho, name) = match spin {
        Spin::Up => (h.n_up, h.rho_up, "up"),
        Spin::Down => (h.n_down, h.rho_down, "down"),
    };
    if let Some(n) = n {
        return match fermi_ball(l, n, spin) {
            Ok(_) => Ok((n, None)),
            Err(Error::IncompleteShell { .. }) if h.auto_snap => {
                let snapped = admissible_below(l, n)?
                    .filter(|&c| c > 0)
                    .ok_or_else(|| CliError::Config(format!("hf.n_{name}: no complete shell at or below {n}")))?;
                Ok((snapped, Some(format!("L = {l}: N_{name} = {n} snapped to {snapped}"))))
            }
            Err(e) => Err(e.into()),
        };
    }
    let rho = rho.expect("validated");
    let target = (rho * l.powi(3)).floor() as usize;
    let n = admissible_below(l, target)?.filter(|&c| c > 0).ok_or_else(|| {
        CliError::Config(format!(
            "hf.rho_{name}: no complete shell at or below ρL³ = {} at L = {l}",
            rho * l.powi(3)
        ))
    })?;
    Ok((n, Some(format!("L = {l}: rho_{name} = {rho} uses N_{name} = {n}"))))
}

fn row(h: &HfSection, fourier: &FourierPotential, l: f64) -> Result<(Vec<String>, Vec<String>), CliError> {
    let (nu, note_u) = count(h, l, Spin::Up)?;
    let (nd, note_d) = count(h, l, Spin::Down)?;
    let balls = [fermi_ball(l, nu, Spin::Up)?, fermi_ball(l, nd, Spin::Down)?];
    let e = hf_energy(&balls, fourier)?;
    let d = hf_density(&e);
    let cells = vec![
        num(l),
        nu.to_string(),
        nd.to_string(),
        num(e.rho_up),
        num(e.rho_down),
        num(e.kinetic),
        num(e.direct),
        num(e.exchange),
        num(e.total),
        num(d.kinetic_density),
        num(d.interaction_density),
        num(e.density_total),
        num(kinetic_density_error(&e)),
        num(e.taylor_residual),
    ];
    Ok((cells, note_u.into_iter().chain(note_d).collect()))
}

pub fn run(cfg: &Config, hash: &str) -> Result<String, CliError> {
    let h = cfg
        .hf
        .as_ref()
        .ok_or_else(|| CliError::Config("hf: section missing".into()))?;
    let fourier = FourierPotential::with_tolerance(cfg.potential.radial(), cfg.potential.fourier_tol);
    let rows =
        h.l.par_iter()
            .map(|&l| row(h, &fourier, l))
            .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new("hf", hash, &COLUMNS);
    for (cells, notes) in rows {
        for n in notes {
            eprintln!("notice: {n}");
        }
        table.row(&cells);
    }
    Ok(table.into_string())
}
