//! Plane-wave reflection and transmission at a planar interface.
//!
//! Relative permittivities are complex, `eps_r - j sigma / (omega eps0)`.
//! The p-polarized reflection coefficient uses the convention in which both
//! polarizations agree at normal incidence.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Electric field perpendicular to the plane of incidence.
    S,
    /// Electric field in the plane of incidence.
    P,
}

/// All four amplitude coefficients for one incidence angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<T> {
    pub rs: Complex<T>,
    pub rp: Complex<T>,
    pub ts: Complex<T>,
    pub tp: Complex<T>,
}

/// Coefficients for medium 1 -> medium 2 given `cos(theta_i)` in `[0, 1]`.
///
/// Below the critical angle the transmitted cosine is taken with a
/// non-negative real part; beyond it the evanescent (decaying) branch is used.
pub fn coefficients_at_cos<T: Real>(eps1: Complex<T>, eps2: Complex<T>, cos_i: T) -> Coefficients<T> {
    let one = T::one();
    let two = Complex::new(T::lit(2.0), T::zero());
    let sin2 = one - cos_i * cos_i;
    let n1 = eps1.sqrt();
    let n2 = eps2.sqrt();
    // q = n2 cos(theta_t)
    let mut q = (eps2 - eps1 * sin2).sqrt();
    if q.im > T::zero() && q.re.abs() <= q.im * T::epsilon() {
        q = -q;
    }
    let n1ci = n1 * cos_i;
    let n2ci = n2 * cos_i;
    let n1ct = n1 * q / n2;
    Coefficients {
        rs: (n1ci - q) / (n1ci + q),
        ts: two * n1ci / (n1ci + q),
        rp: (n1ct - n2ci) / (n1ct + n2ci),
        tp: two * n1ci / (n1ct + n2ci),
    }
}

/// `(r, t)` for one polarization at incidence angle `theta_i` (radians).
pub fn fresnel_coefficients<T: Real>(
    eps1: Complex<T>,
    eps2: Complex<T>,
    theta_i: T,
    pol: Polarization,
) -> Result<(Complex<T>, Complex<T>)> {
    if !(theta_i >= T::zero()) {
        return Err(Error::domain(format!("incidence angle {theta_i} is negative")));
    }
    if theta_i >= T::FRAC_PI_2() {
        return Err(Error::domain(format!(
            "grazing incidence: theta_i = {theta_i} rad is not below pi/2"
        )));
    }
    let c = coefficients_at_cos(eps1, eps2, theta_i.cos());
    Ok(match pol {
        Polarization::S => (c.rs, c.ts),
        Polarization::P => (c.rp, c.tp),
    })
}

/// Reflecting/transmitting surface as seen by the tracer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    Pec,
    Dielectric(Complex<f64>),
}

impl Surface {
    /// `(r_s, r_p)` for incidence from air.
    pub fn reflection(&self, cos_i: f64) -> (Complex<f64>, Complex<f64>) {
        match *self {
            Surface::Pec => (Complex::new(-1.0, 0.0), Complex::new(-1.0, 0.0)),
            Surface::Dielectric(eps) => {
                let c = coefficients_at_cos(Complex::new(1.0, 0.0), eps, cos_i.clamp(0.0, 1.0));
                (c.rs, c.rp)
            }
        }
    }

    /// Air -> medium coefficients; `None` for a conductor.
    pub fn entry(&self, cos_i: f64) -> Option<Coefficients<f64>> {
        match *self {
            Surface::Pec => None,
            Surface::Dielectric(eps) => Some(coefficients_at_cos(
                Complex::new(1.0, 0.0),
                eps,
                cos_i.clamp(0.0, 1.0),
            )),
        }
    }

    /// Medium -> air transmission `(t'_s, t'_p)` for a ray leaving at external
    /// angle `acos(cos_e)`, from the Stokes relation `t t' = 1 - r^2`.
    pub fn exit(&self, cos_e: f64) -> Option<(Complex<f64>, Complex<f64>)> {
        let c = self.entry(cos_e)?;
        let one = Complex::new(1.0, 0.0);
        Some(((one - c.rs * c.rs) / c.ts, (one - c.rp * c.rp) / c.tp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identical_media_pass_everything() {
        for &eps in &[c(1.0), c(4.0), Complex64::new(5.31, -0.31)] {
            for k in 0..10 {
                let th = k as f64 * 0.15;
                for pol in [Polarization::S, Polarization::P] {
                    let (r, t) = fresnel_coefficients(eps, eps, th, pol).unwrap();
                    assert!(r.norm() < 1e-14, "{r}");
                    assert!((t - c(1.0)).norm() < 1e-14, "{t}");
                }
            }
        }
    }

    #[test]
    fn normal_incidence_on_eps_four() {
        for pol in [Polarization::S, Polarization::P] {
            let (r, t) = fresnel_coefficients(c(1.0), c(4.0), 0.0, pol).unwrap();
            assert!((r - c(-1.0 / 3.0)).norm() < 1e-15);
            assert!((t - c(2.0 / 3.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn grazing_is_rejected() {
        let e = fresnel_coefficients(c(1.0), c(4.0), std::f64::consts::FRAC_PI_2, Polarization::S);
        assert!(matches!(e, Err(Error::Domain(_))));
        assert!(fresnel_coefficients(c(1.0), c(4.0), 2.0, Polarization::P).is_err());
    }

    #[test]
    fn brewster_angle_zeroes_p_reflection() {
        let th = 2f64.atan();
        let (r, _) = fresnel_coefficients(c(1.0), c(4.0), th, Polarization::P).unwrap();
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn single_precision_matches() {
        let (r, t) = fresnel_coefficients(
            Complex::new(1.0f32, 0.0),
            Complex::new(4.0f32, 0.0),
            0.3,
            Polarization::S,
        )
        .unwrap();
        let (r64, t64) = fresnel_coefficients(c(1.0), c(4.0), 0.3, Polarization::S).unwrap();
        assert!((r.re as f64 - r64.re).abs() < 1e-6);
        assert!((t.re as f64 - t64.re).abs() < 1e-6);
    }

    #[test]
    fn conductor_reflects_fully() {
        let (rs, rp) = Surface::Pec.reflection(0.4);
        assert_eq!((rs, rp), (c(-1.0), c(-1.0)));
        assert!(Surface::Pec.entry(0.4).is_none());
    }

    #[test]
    fn grazing_limit_of_dielectric() {
        let (rs, rp) = Surface::Dielectric(Complex64::new(2.58, -0.1)).reflection(0.0);
        assert!((rs - c(-1.0)).norm() < 1e-12);
        assert!((rp - c(1.0)).norm() < 1e-12);
    }
}
