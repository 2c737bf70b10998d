//! Closed-form energy densities of the dilute gas: free term, `8πa ρ↑ρ↓`, the `ρ^{7/3}`
//! correction and the error envelope of the leading-order expansion.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};

/// Exponent gaps of the remainder envelope, `-Cρ^{2+1/9} ≤ r ≤ Cρ^{2+2/9}`.
pub const XI_UPPER: f64 = 2.0 / 9.0;
pub const XI_LOWER: f64 = 1.0 / 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticInput {
    pub rho_up: f64,
    pub rho_down: f64,
    /// Scattering length.
    pub a: f64,
}

impl AsymptoticInput {
    pub fn new(rho_up: f64, rho_down: f64, a: f64) -> Result<Self> {
        if !(rho_up >= 0.0 && rho_down >= 0.0 && a >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "densities and scattering length must be ≥ 0 (got {rho_up}, {rho_down}, {a})"
            )));
        }
        Ok(AsymptoticInput { rho_up, rho_down, a })
    }

    pub fn rho(&self) -> f64 {
        self.rho_up + self.rho_down
    }
}

/// `(3/5)(6π²)^{2/3}(ρ↑^{5/3} + ρ↓^{5/3})`.
pub fn free_density(rho_up: f64, rho_down: f64) -> f64 {
    0.6 * (6.0 * PI * PI).powf(2.0 / 3.0) * (rho_up.powf(5.0 / 3.0) + rho_down.powf(5.0 / 3.0))
}

/// `8πa ρ↑ρ↓`.
pub fn interaction_density(inp: &AsymptoticInput) -> f64 {
    8.0 * PI * inp.a * (inp.rho_up * inp.rho_down)
}

/// Free plus `8πa` terms, remainder excluded.
pub fn lss_density(inp: &AsymptoticInput) -> f64 {
    free_density(inp.rho_up, inp.rho_down) + interaction_density(inp)
}

/// `4(11 − 2 ln 2)/(35π²) · (3/(4π))^{4/3}`.
pub fn hy_coefficient() -> f64 {
    4.0 * (11.0 - 2.0 * LN_2) / (35.0 * PI * PI) * (3.0 / (4.0 * PI)).powf(4.0 / 3.0)
}

/// `coefficient · a² ρ^{7/3}`.
pub fn hy_term(inp: &AsymptoticInput) -> f64 {
    hy_coefficient() * inp.a * inp.a * inp.rho().powf(7.0 / 3.0)
}

pub fn hy_density(inp: &AsymptoticInput) -> f64 {
    lss_density(inp) + hy_term(inp)
}

/// `(−C ρ^{2+1/9}, +C ρ^{2+2/9})`. The constant is not known numerically and must be
/// supplied by the caller.
pub fn error_envelope(rho: f64, c: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("envelope needs ρ > 0, got {rho}")));
    }
    Ok((-c * rho.powf(2.0 + XI_LOWER), c * rho.powf(2.0 + XI_UPPER)))
}

/// An interaction energy density tagged with the densities it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionDensity {
    pub rho_up: f64,
    pub rho_down: f64,
    pub value: f64,
}

/// Difference between the mean-field interaction density `V̂(0)ρ↑ρ↓` and the true
/// `8πaρ↑ρ↓`: the part of the energy carried by correlations.
pub fn correlation_gap(hf: &InteractionDensity, lss: &InteractionDensity) -> Result<f64> {
    let same = |x: f64, y: f64| (x - y).abs() <= 1e-14 * x.abs().max(y.abs());
    if !same(hf.rho_up, lss.rho_up) || !same(hf.rho_down, lss.rho_down) {
        return Err(Error::DensityMismatch(hf.rho_up, hf.rho_down, lss.rho_up, lss.rho_down));
    }
    Ok(hf.value - lss.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lss_examples() {
        let inp = AsymptoticInput::new(0.01, 0.02, 0.0).unwrap();
        assert_eq!(lss_density(&inp), free_density(0.01, 0.02));
        let inp = AsymptoticInput::new(0.03, 0.0, 0.7).unwrap();
        assert_eq!(
            lss_density(&inp),
            0.6 * (6.0 * PI * PI).powf(2.0 / 3.0) * 0.03f64.powf(5.0 / 3.0)
        );
        // independent evaluation via k_F: (3/5) k_F² ρ per species
        let inp = AsymptoticInput::new(0.005, 0.005, 0.1).unwrap();
        let kf = (6.0 * PI * PI * 0.005f64).cbrt();
        let alt = 2.0 * 0.6 * kf * kf * 0.005 + 8.0 * PI * 0.1 * 0.005 * 0.005;
        assert!((lss_density(&inp) - alt).abs() < 1e-15);
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(error_envelope(1.0, 1.0).unwrap(), (-1.0, 1.0));
        let (lo, hi) = error_envelope(1e-3, 1.0).unwrap();
        assert!((hi / -lo - 1e-3f64.powf(1.0 / 9.0)).abs() < 1e-12);
        let (_, h1) = error_envelope(0.02, 2.0).unwrap();
        let (_, h2) = error_envelope(0.01, 2.0).unwrap();
        assert!((h2 / h1 - 2f64.powf(-(2.0 + 2.0 / 9.0))).abs() < 1e-13);
        assert!(error_envelope(0.0, 1.0).is_err());
    }

    #[test]
    fn hy_reduces_to_lss_without_interaction() {
        let inp = AsymptoticInput::new(0.01, 0.004, 0.0).unwrap();
        assert_eq!(hy_density(&inp), lss_density(&inp));
    }

    #[test]
    fn hy_to_interaction_ratio_scales_as_a_rho_third() {
        // at ρ↑ = ρ↓ = ρ/2 the ratio is coefficient·a·ρ^{1/3}·4/(8π)... up to a constant
        let ratio = |rho: f64, a: f64| {
            let inp = AsymptoticInput::new(rho / 2.0, rho / 2.0, a).unwrap();
            hy_term(&inp) / interaction_density(&inp)
        };
        let c = hy_coefficient() * 4.0 / (8.0 * PI);
        for (rho, a) in [(1e-3, 0.5), (1e-2, 2.0), (0.2, 0.1)] {
            assert!((ratio(rho, a) - c * a * rho.cbrt()).abs() < 1e-14 * ratio(rho, a).abs().max(1.0));
        }
    }

    #[test]
    fn gap_examples() {
        let mk = |v| InteractionDensity {
            rho_up: 0.1,
            rho_down: 0.2,
            value: v,
        };
        assert_eq!(correlation_gap(&mk(8.0), &mk(8.0)).unwrap(), 0.0);
        let other = InteractionDensity {
            rho_up: 0.1,
            rho_down: 0.3,
            value: 1.0,
        };
        assert!(matches!(
            correlation_gap(&mk(1.0), &other),
            Err(Error::DensityMismatch(..))
        ));
    }

    proptest! {
        #[test]
        fn lss_symmetric_and_monotone(u in 0.0f64..0.1, d in 1e-6f64..0.1, a in 0.0f64..2.0, da in 1e-6f64..1.0) {
            let x = lss_density(&AsymptoticInput::new(u, d, a).unwrap());
            let y = lss_density(&AsymptoticInput::new(d, u, a).unwrap());
            prop_assert_eq!(x, y);
            if u > 0.0 {
                let z = lss_density(&AsymptoticInput::new(u, d, a + da).unwrap());
                prop_assert!(z > x);
            }
            let inp = AsymptoticInput::new(u, d, a).unwrap();
            prop_assert!(hy_density(&inp) - lss_density(&inp) >= 0.0);
        }
    }
}
