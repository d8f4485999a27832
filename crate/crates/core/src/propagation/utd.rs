//! Heuristic UTD diffraction coefficient for lossy wedges.
//!
//! The coefficient follows the Kouyoumjian-Pathak form with the two
//! reflection-boundary terms weighted by the Fresnel coefficients of the
//! adjacent faces (Luebbers). Faces are indexed 0 and n; angles are measured
//! from face 0 through the exterior of the wedge, so the open region is
//! `0 < phi < n pi`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::propagation::fresnel::{Polarization, Surface};
use crate::Vec3;

/// Below this distance from a shadow or reflection boundary the cotangent-times-
/// transition product is replaced by its analytic limit.
const BOUNDARY_EPS: f64 = 1e-5;

/// Keller cone tolerance on `|cos(beta0) - cos(beta0')|`.
pub const KELLER_TOL: f64 = 1e-6;

fn cis<T: Real>(a: T) -> Complex<T> {
    Complex::new(a.cos(), a.sin())
}

/// UTD transition function `F(X) = 2j sqrt(X) e^{jX} int_{sqrt X}^inf e^{-j t^2} dt`.
pub fn transition_function<T: Real>(x: T) -> Complex<T> {
    let zero = T::zero();
    let j = Complex::new(zero, T::one());
    if x <= zero {
        return Complex::new(zero, zero);
    }
    let a = x.sqrt();
    let quarter = T::FRAC_PI_4();
    if x <= T::lit(4.0) {
        // Power series of int_0^a e^{-j t^2} dt.
        let mut term = Complex::new(a, zero); // (-j)^k a^(2k+1) / k!
        let mut sum = term;
        let a2 = a * a;
        let mut k = 0usize;
        loop {
            k += 1;
            term = term * Complex::new(zero, -a2) / T::from_usize_lossy(k);
            let add = term / T::from_usize_lossy(2 * k + 1);
            sum = sum + add;
            if add.norm_sqr() < (T::epsilon() * T::lit(1e-2)).powi(2) || k > 200 {
                break;
            }
        }
        let total = cis(-quarter) * (T::PI().sqrt() / T::lit(2.0));
        let tail = total - sum;
        j * a * T::lit(2.0) * cis(x) * tail
    } else {
        // erfc continued fraction at z = e^{j pi/4} sqrt(X), modified Lentz.
        let z = cis(quarter) * a;
        let tiny = T::lit(1e-30);
        let mut f = z;
        let mut c = z;
        let mut d = Complex::new(zero, zero);
        for k in 1..500 {
            let ak = T::from_usize_lossy(k) / T::lit(2.0);
            d = z + d * ak;
            if d.norm_sqr() < tiny * tiny {
                d = Complex::new(tiny, zero);
            }
            d = d.inv();
            c = z + c.inv() * ak;
            if c.norm_sqr() < tiny * tiny {
                c = Complex::new(tiny, zero);
            }
            let delta = c * d;
            f = f * delta;
            if (delta - Complex::new(T::one(), zero)).norm_sqr() < T::epsilon() * T::epsilon() {
                break;
            }
        }
        // K(z) = 1 / f
        j * a * cis(-quarter) / f
    }
}

/// `cot((pi + sign beta) / 2n) F(kL a^sign(beta))` with the boundary limit.
fn term<T: Real>(sign: T, beta: T, n: T, kl: T) -> Complex<T> {
    let pi = T::PI();
    let two = T::lit(2.0);
    let quarter = cis(T::FRAC_PI_4());
    // N maximizes alignment: 2 pi n N - beta = sign * pi
    let big_n = ((beta + sign * pi) / (two * pi * n)).round();
    let eps = pi + sign * beta - sign * two * pi * n * big_n;
    if eps.abs() < T::lit(BOUNDARY_EPS) {
        let sgn = if eps >= T::zero() { T::one() } else { -T::one() };
        let lead = Complex::new((two * pi * kl).sqrt() * sgn, T::zero());
        return (lead - quarter * (two * kl * eps)) * quarter * n;
    }
    let a = two * ((two * pi * n * big_n - beta) / two).cos().powi(2);
    let cot = T::one() / ((pi + sign * beta) / (two * n)).tan();
    transition_function(kl * a) * cot
}

/// Scalar UTD coefficient.
///
/// `phi`, `phi_p`: observation and source angles from face 0; `beta0`: angle
/// between the rays and the edge; `k`: wavenumber; `l`: distance parameter;
/// `r0`, `rn`: face reflection coefficients (`-1`/`+1` for a conducting wedge
/// with soft/hard polarization).
#[allow(clippy::too_many_arguments)]
pub fn utd_coefficient<T: Real>(
    n: T,
    phi: T,
    phi_p: T,
    beta0: T,
    k: T,
    l: T,
    r0: Complex<T>,
    rn: Complex<T>,
) -> Complex<T> {
    let bm = phi - phi_p;
    let bp = phi + phi_p;
    let kl = k * l;
    let one = T::one();
    let sum = term(one, bm, n, kl) + term(-one, bm, n, kl) + r0 * term(-one, bp, n, kl) + rn * term(one, bp, n, kl);
    let pre = -cis(-T::FRAC_PI_4()) / (T::lit(2.0) * n * (T::lit(2.0) * T::PI() * k).sqrt() * beta0.sin());
    sum * pre
}

/// Straight edge with two planar faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    /// Start of the edge.
    pub origin: Vec3,
    /// Unit edge direction; `face0 x normal0`.
    pub edge: Vec3,
    pub length: f64,
    /// Unit vector along face 0, perpendicular to the edge, pointing away from it.
    pub face0: Vec3,
    /// Outward unit normal of face 0.
    pub normal0: Vec3,
    /// Exterior angle over pi.
    pub n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeFaces {
    pub face0: Surface,
    pub face_n: Surface,
}

impl Wedge {
    pub fn new(origin: Vec3, edge: Vec3, length: f64, face0: Vec3, n: f64) -> Self {
        let edge = edge.normalize();
        let face0 = face0.normalize();
        Self {
            origin,
            edge,
            length,
            face0,
            normal0: edge.cross(face0),
            n,
        }
    }

    /// Angle of direction `v` (pointing away from the edge) measured from face 0, in `[0, 2 pi)`.
    pub fn angle_of(&self, v: Vec3) -> f64 {
        let a = v.dot(self.normal0).atan2(v.dot(self.face0));
        if a < 0.0 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a
        }
    }

    pub fn is_open(&self, phi: f64, margin: f64) -> bool {
        phi > margin && phi < self.n * std::f64::consts::PI - margin
    }
}

/// Geometry-level inputs derived from the ray directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeAngles {
    pub phi: f64,
    pub phi_p: f64,
    pub beta0: f64,
}

/// Angles for incident direction `s_in` (source toward edge) and diffracted
/// direction `s_out` (edge toward observer).
pub fn wedge_angles(w: &Wedge, s_in: Vec3, s_out: Vec3) -> Result<WedgeAngles> {
    let cb_in = s_in.dot(w.edge);
    let cb_out = s_out.dot(w.edge);
    if (cb_in - cb_out).abs() > KELLER_TOL {
        return Err(Error::domain(format!(
            "diffracted direction is off the Keller cone: cos(beta0') = {cb_in:.9}, cos(beta0) = {cb_out:.9}"
        )));
    }
    Ok(WedgeAngles {
        phi: w.angle_of(s_out),
        phi_p: w.angle_of(-s_in),
        beta0: cb_out.clamp(-1.0, 1.0).acos(),
    })
}

/// `(soft, hard)` face coefficients; hard is the negated parallel Fresnel coefficient.
fn face_coefficients(surface: Surface, grazing: f64, beta0: f64) -> (Complex<f64>, Complex<f64>) {
    let psi = grazing.clamp(0.0, std::f64::consts::FRAC_PI_2);
    let (rs, rp) = surface.reflection(beta0.sin() * psi.sin());
    (rs, -rp)
}

/// Diffraction coefficient of `w` for the given ray directions.
///
/// `s_prime` and `s` are the source-to-edge and edge-to-observer distances.
/// `Polarization::S` gives the soft coefficient (field along beta0), `P` the
/// hard one (field along phi).
#[allow(clippy::too_many_arguments)]
pub fn utd_wedge_coefficient(
    w: &Wedge,
    faces: &WedgeFaces,
    s_in: Vec3,
    s_out: Vec3,
    f_ghz: f64,
    pol: Polarization,
    s_prime: f64,
    s: f64,
) -> Result<Complex<f64>> {
    let a = wedge_angles(w, s_in, s_out)?;
    Ok(coefficient_from_angles(w.n, &a, faces, f_ghz, pol, s_prime, s))
}

fn coefficient_from_angles(
    n: f64,
    a: &WedgeAngles,
    faces: &WedgeFaces,
    f_ghz: f64,
    pol: Polarization,
    s_prime: f64,
    s: f64,
) -> Complex<f64> {
    let (ds, dh) = soft_hard_from_angles(n, a, faces, f_ghz, s_prime, s);
    match pol {
        Polarization::S => ds,
        Polarization::P => dh,
    }
}

/// Soft and hard coefficients together; the transition terms are shared.
pub(crate) fn soft_hard_from_angles(
    n: f64,
    a: &WedgeAngles,
    faces: &WedgeFaces,
    f_ghz: f64,
    s_prime: f64,
    s: f64,
) -> (Complex<f64>, Complex<f64>) {
    let k = wavenumber(f_ghz);
    let sb = a.beta0.sin();
    let kl = k * s * s_prime * sb * sb / (s + s_prime);
    let (bm, bp) = (a.phi - a.phi_p, a.phi + a.phi_p);
    let t1 = term(1.0, bm, n, kl) + term(-1.0, bm, n, kl);
    let t3 = term(-1.0, bp, n, kl);
    let t4 = term(1.0, bp, n, kl);
    let (r0s, r0h) = face_coefficients(faces.face0, a.phi_p, a.beta0);
    let (rns, rnh) = face_coefficients(faces.face_n, n * std::f64::consts::PI - a.phi, a.beta0);
    let pre = -cis(-std::f64::consts::FRAC_PI_4) / (2.0 * n * (2.0 * std::f64::consts::PI * k).sqrt() * sb);
    ((t1 + r0s * t3 + rns * t4) * pre, (t1 + r0h * t3 + rnh * t4) * pre)
}

pub fn wavenumber(f_ghz: f64) -> f64 {
    2.0 * std::f64::consts::PI * f_ghz * 1e9 / crate::propagation::field::C0
}

/// Spherical-wave spreading factor `sqrt(s' / (s (s + s')))`.
pub fn spreading(s_prime: f64, s: f64) -> f64 {
    (s_prime / (s * (s + s_prime))).sqrt()
}
