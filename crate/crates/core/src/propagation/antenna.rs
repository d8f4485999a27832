//! Antenna gain patterns and polarization vectors.

use crate::num::Real;
use crate::scene::AntennaPattern;
use crate::Vec3;

/// Peak directivity of a half-wave dipole, `4 / Cin(2 pi)`.
pub const DIPOLE_PEAK_GAIN: f64 = 1.640_922_376_984_585;

/// Half-wave dipole gain at polar angle `theta` from the dipole axis.
pub fn dipole_gain<T: Real>(theta: T) -> T {
    let s = theta.sin();
    if s.abs() < T::lit(1e-12) {
        return T::zero();
    }
    let f = (T::FRAC_PI_2() * theta.cos()).cos() / s;
    T::lit(DIPOLE_PEAK_GAIN) * f * f
}

pub fn gain(pattern: AntennaPattern, theta: f64) -> f64 {
    match pattern {
        AntennaPattern::HalfWaveDipole => dipole_gain(theta),
        AntennaPattern::Isotropic => 1.0,
    }
}

/// Gain toward unit direction `dir` for a vertical antenna.
pub fn gain_toward(pattern: AntennaPattern, dir: Vec3) -> f64 {
    match pattern {
        AntennaPattern::HalfWaveDipole => dipole_gain(dir.z.clamp(-1.0, 1.0).acos()),
        AntennaPattern::Isotropic => 1.0,
    }
}

/// Vertical polarization vector transverse to `dir`: the projection of z onto the
/// plane normal to `dir`. Falls back to x when `dir` is vertical.
pub fn vertical_polarization(dir: Vec3) -> Vec3 {
    let v = Vec3::unit_z() - dir * dir.z;
    let n = v.norm();
    if n < 1e-12 {
        Vec3::unit_x()
    } else {
        v / n
    }
}

/// Full width between the half-power points of the dipole pattern, degrees.
pub fn dipole_hpbw_deg() -> f64 {
    // Bisection on (0, pi/2) for G = G_max / 2.
    let target = DIPOLE_PEAK_GAIN / 2.0;
    let (mut lo, mut hi) = (1e-6, std::f64::consts::FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dipole_gain(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (180.0 - 2.0 * 0.5 * (lo + hi).to_degrees()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn broadside_peak_and_axial_null() {
        assert!((dipole_gain(PI / 2.0) - 1.640922376984585).abs() < 1e-12);
        assert!((10.0 * dipole_gain(PI / 2.0).log10() - 2.15088).abs() < 1e-4);
        assert_eq!(dipole_gain(0.0), 0.0);
        assert!(dipole_gain(PI) < 1e-12);
        assert!((dipole_gain(std::f32::consts::FRAC_PI_2) - 1.6409224).abs() < 1e-6);
    }

    #[test]
    fn pattern_integrates_to_isotropic() {
        // Midpoint rule over theta; the integrand is smooth.
        let n = 20_000;
        let h = PI / n as f64;
        let total: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                dipole_gain(t) * t.sin() * h
            })
            .sum::<f64>()
            * 2.0
            * PI;
        assert!((total / (4.0 * PI) - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn half_power_beamwidth() {
        let w = dipole_hpbw_deg();
        assert!((w - 78.0777).abs() < 1e-3, "{w}");
        assert!((w - 78.0).abs() <= 1.0);
    }

    #[test]
    fn polarization_is_transverse() {
        let d = Vec3::new(0.3, -0.4, 0.5).normalize();
        let p = vertical_polarization(d);
        assert!(p.dot(d).abs() < 1e-15);
        assert!(p.z > 0.0);
        assert_eq!(vertical_polarization(Vec3::unit_z()), Vec3::unit_x());
    }
}
