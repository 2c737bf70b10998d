//! Neumann scattering table over a density sweep, followed by power-law fits.

use rayon::prelude::*;

use dilute_fermi::fit::power_law;
use dilute_fermi::scattering::solve;
use dilute_fermi::Error;

use crate::config::Config;
use crate::error::CliError;
use crate::output::{num, Table};

pub const COLUMNS: [&str; 7] = [
    "rho",
    "gamma",
    "radius",
    "lambda",
    "a_gamma",
    "a",
    "abs_a_gamma_minus_a",
];

pub fn run(cfg: &Config, hash: &str) -> Result<String, CliError> {
    let s = cfg
        .scatter
        .as_ref()
        .ok_or_else(|| CliError::Config("scatter: section missing".into()))?;
    let pot = cfg.potential.radial();
    let neumann = s.neumann();
    let sols = s
        .densities
        .par_iter()
        .map(|&rho| solve(&pot, s.gamma, rho, &neumann))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new("scatter", hash, &COLUMNS);
    for x in &sols {
        table.row(&[
            num(x.rho),
            num(x.gamma),
            num(x.radius),
            num(x.lambda),
            num(x.a_gamma),
            num(x.a0),
            num((x.a_gamma - x.a0).abs()),
        ]);
    }
    table.blank();
    table.row(&[
        "quantity".into(),
        "exponent".into(),
        "prefactor".into(),
        "points".into(),
        "excluded".into(),
    ]);
    let rhos: Vec<f64> = sols.iter().map(|x| x.rho).collect();
    let series = [
        ("lambda", sols.iter().map(|x| x.lambda).collect::<Vec<_>>()),
        ("abs_a_gamma_minus_a", sols.iter().map(|x| x.a_gamma - x.a0).collect()),
    ];
    for (name, ys) in series {
        match power_law(&rhos, &ys, 1e-300) {
            Ok(f) => table.row(&[
                name.into(),
                num(f.exponent),
                num(f.prefactor),
                f.points.to_string(),
                f.excluded.to_string(),
            ]),
            Err(Error::DegenerateFit(msg)) => table.comment(&format!("{name}: degenerate fit ({msg})")),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(table.into_string())
}
