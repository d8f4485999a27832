//! Bundled material table with a power-law conductivity model.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum permittivity in F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Electrical description of a material.
///
/// Conductivity follows `sigma(f) = c * f_GHz^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub name: String,
    pub eps_r: f64,
    pub sigma_coeff_c: f64,
    pub sigma_exp_d: f64,
    /// Perfect electric conductor; overrides the dielectric parameters.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub perfect_conductor: bool,
}

impl MaterialSpec {
    pub fn new(name: &str, eps_r: f64, c: f64, d: f64) -> Self {
        Self {
            name: name.to_string(),
            eps_r,
            sigma_coeff_c: c,
            sigma_exp_d: d,
            perfect_conductor: false,
        }
    }

    /// Relative complex permittivity `eps_r - j sigma / (omega eps0)` at `f_ghz`.
    pub fn complex_permittivity(&self, f_ghz: f64) -> Result<Complex64> {
        let (eps, sigma) = material_at_frequency(self, f_ghz)?;
        let omega = 2.0 * std::f64::consts::PI * f_ghz * 1e9;
        Ok(Complex64::new(eps, -sigma / (omega * EPS0)))
    }
}

/// `(eps_r, sigma [S/m])` of `m` at frequency `f_ghz`.
pub fn material_at_frequency(m: &MaterialSpec, f_ghz: f64) -> Result<(f64, f64)> {
    if !(f_ghz > 0.0) || !f_ghz.is_finite() {
        return Err(Error::domain(format!(
            "frequency must be positive, got {f_ghz} GHz"
        )));
    }
    Ok((m.eps_r, m.sigma_coeff_c * f_ghz.powf(m.sigma_exp_d)))
}

/// Built-in materials. ITU-R P.2040 coefficients for the building materials.
pub fn bundled() -> &'static [MaterialSpec] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<MaterialSpec>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut pec = MaterialSpec::new("pec", 1.0, 0.0, 0.0);
        pec.perfect_conductor = true;
        vec![
            MaterialSpec::new("air", 1.0, 0.0, 0.0),
            MaterialSpec::new("concrete", 5.31, 0.0326, 0.8095),
            MaterialSpec::new("wood", 1.99, 0.0047, 1.0718),
            MaterialSpec::new("plasterboard", 2.94, 0.0116, 0.7076),
            MaterialSpec::new("chipboard", 2.58, 0.0217, 0.78),
            pec,
        ]
    })
}

pub fn by_name(name: &str) -> Option<&'static MaterialSpec> {
    bundled().iter().find(|m| m.name == name)
}

/// Materials furniture is drawn from.
pub const FURNITURE: [&str; 3] = ["wood", "chipboard", "plasterboard"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn air_is_vacuum() {
        let air = by_name("air").unwrap();
        assert_eq!(material_at_frequency(air, 5.0).unwrap(), (1.0, 0.0));
        assert_eq!(material_at_frequency(air, 28.0).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn rejects_non_positive_frequency() {
        let wood = by_name("wood").unwrap();
        assert!(matches!(material_at_frequency(wood, 0.0), Err(Error::Domain(_))));
        assert!(material_at_frequency(wood, -5.0).is_err());
        assert!(material_at_frequency(wood, f64::NAN).is_err());
    }

    #[test]
    fn conductivity_rises_with_frequency() {
        for m in bundled() {
            let lo = material_at_frequency(m, 1.0).unwrap().1;
            let hi = material_at_frequency(m, 60.0).unwrap().1;
            assert!(hi >= lo, "{}", m.name);
            assert!(m.eps_r >= 1.0 && m.sigma_coeff_c >= 0.0);
        }
    }

    #[test]
    fn complex_permittivity_has_negative_imaginary_part() {
        let c = by_name("concrete").unwrap().complex_permittivity(28.0).unwrap();
        assert_eq!(c.re, 5.31);
        // 0.4838 / (2 pi 28e9 eps0)
        assert!((c.im + 0.3106).abs() < 1e-3, "{c}");
    }
}
