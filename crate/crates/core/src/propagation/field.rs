//! Complex field carried along a traced path and received power.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagation::antenna::{gain_toward, vertical_polarization};
use crate::propagation::fresnel::Surface;
use crate::propagation::path::{InteractionKind, Medium, RayPath, Reference};
use crate::propagation::trace::Tracer;
use crate::propagation::utd::{soft_hard_from_angles, wedge_angles};
use crate::scene::AntennaPattern;
use crate::Vec3;

pub const C0: f64 = 299_792_458.0;
/// Free-space wave impedance, ohms.
pub const ETA0: f64 = 377.0;

/// Complex 3-vector (phasor field).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec3 {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl CVec3 {
    pub fn from_real(v: Vec3, a: Complex64) -> Self {
        Self {
            x: a * v.x,
            y: a * v.y,
            z: a * v.z,
        }
    }

    /// Projection on a real direction, `E . v`.
    #[inline]
    pub fn dot(&self, v: Vec3) -> Complex64 {
        self.x * v.x + self.y * v.y + self.z * v.z
    }

    #[inline]
    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            x: self.x * a,
            y: self.y * a,
            z: self.z * a,
        }
    }

    #[inline]
    pub fn add(&self, o: &Self) -> Self {
        Self {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()).sqrt()
    }
}

/// Field arriving at the receiver along one path.
#[derive(Debug, Clone)]
pub struct FieldContribution {
    /// Phasor field at the receiver, V/m.
    pub e_field: CVec3,
    /// Unit direction of travel of the last segment.
    pub arrival: Vec3,
    pub delay_s: f64,
    pub path: RayPath,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Unit vector perpendicular to the plane of incidence of `k` on a surface
/// with normal `n`; any tangent direction at normal incidence.
#[inline]
fn perpendicular(k: Vec3, n: Vec3) -> Vec3 {
    let s = k.cross(n);
    let l = s.norm();
    if l > 1e-12 {
        return s / l;
    }
    let t = if n.x.abs() < 0.9 { Vec3::unit_x() } else { Vec3::new(0.0, 1.0, 0.0) };
    n.cross(t).normalize()
}

#[inline]
fn reflect(e: CVec3, k_in: Vec3, k_out: Vec3, n: Vec3, surface: Surface) -> CVec3 {
    let s = perpendicular(k_in, n);
    let p_i = s.cross(k_in);
    let p_r = k_out.cross(s);
    let (rs, rp) = surface.reflection(k_in.dot(n).abs());
    CVec3::from_real(s, rs * e.dot(s)).add(&CVec3::from_real(p_r, rp * e.dot(p_i)))
}

#[inline]
fn transmit(e: CVec3, k: Vec3, n: Vec3, ts: Complex64, tp: Complex64) -> CVec3 {
    let s = perpendicular(k, n);
    let p = s.cross(k);
    CVec3::from_real(s, ts * e.dot(s)).add(&CVec3::from_real(p, tp * e.dot(p)))
}

fn diffract(
    tracer: &Tracer<'_>,
    edge: usize,
    e: CVec3,
    s_in: Vec3,
    s_out: Vec3,
    s_prime: f64,
    s: f64,
) -> Result<CVec3> {
    let ed = &tracer.geo.edges[edge];
    let w = &ed.wedge;
    let a = wedge_angles(w, s_in, s_out)?;
    let f = tracer.scene.frequency_ghz;
    let (ds, dh) = soft_hard_from_angles(w.n, &a, &ed.faces, f, s_prime, s);
    let phi_p = (-w.edge.cross(s_in)).normalize();
    let beta_p = phi_p.cross(s_in);
    let phi = w.edge.cross(s_out).normalize();
    let beta = phi.cross(s_out);
    Ok(CVec3::from_real(beta, -ds * e.dot(beta_p)).add(&CVec3::from_real(phi, -dh * e.dot(phi_p))))
}

/// Received field of one path, including antenna gains at both ends.
pub fn path_field(tracer: &Tracer<'_>, path: &RayPath) -> Result<FieldContribution> {
    let e = path_field_vector(tracer, path)?;
    let v = path.vertices();
    let arrival = (v[v.len() - 1] - v[v.len() - 2]).normalize();
    Ok(FieldContribution {
        e_field: e,
        arrival,
        delay_s: path.delay_s(),
        path: path.clone(),
    })
}

pub(crate) fn path_field_vector(tracer: &Tracer<'_>, path: &RayPath) -> Result<CVec3> {
    let scene = tracer.scene;
    let k0 = tracer.k0;
    let v = path.vertices();
    let nseg = v.len() - 1;
    let mut dirs = Vec::with_capacity(nseg);
    let mut lens = Vec::with_capacity(nseg);
    for i in 0..nseg {
        let d = v[i + 1] - v[i];
        let l = d.norm();
        if !(l > 0.0) {
            return Err(Error::domain("path has a zero-length segment"));
        }
        dirs.push(d / l);
        lens.push(l);
    }
    let total: f64 = lens.iter().sum();

    let pt = dbm_to_watts(scene.tx.power_dbm);
    let gt = gain_toward(scene.tx.pattern, dirs[0]);
    let launch = (ETA0 * pt * gt / (2.0 * std::f64::consts::PI)).sqrt();
    let mut e = CVec3::from_real(vertical_polarization(dirs[0]), Complex64::new(launch, 0.0));
    let mut diffraction_at = None;

    for i in 0..nseg {
        if let Medium::Obstacle(o) = path.segment_media[i] {
            let idx = tracer.geo.prisms[o].index;
            let f = (-Complex64::i() * k0 * (idx - 1.0) * lens[i]).exp();
            e = e.scale(f);
        }
        if i + 1 == nseg {
            break;
        }
        let it = &path.interactions[i];
        let (k_in, k_out) = (dirs[i], dirs[i + 1]);
        e = match (it.kind, it.reference) {
            (InteractionKind::Reflect, Reference::Facet(f)) => {
                let fc = &tracer.geo.facets[f];
                reflect(e, k_in, k_out, fc.normal, fc.surface)
            }
            (InteractionKind::TransmitIn, Reference::Facet(f)) => {
                let fc = &tracer.geo.facets[f];
                let c = fc
                    .surface
                    .entry((-k_in.dot(fc.normal)).abs())
                    .ok_or_else(|| Error::domain("transmission into a perfect conductor"))?;
                transmit(e, k_in, fc.normal, c.ts, c.tp)
            }
            (InteractionKind::TransmitOut, Reference::Facet(f)) => {
                let fc = &tracer.geo.facets[f];
                let (ts, tp) = fc
                    .surface
                    .exit(k_in.dot(fc.normal).abs())
                    .ok_or_else(|| Error::domain("transmission out of a perfect conductor"))?;
                transmit(e, k_in, fc.normal, ts, tp)
            }
            (InteractionKind::Diffract, Reference::Edge(ed)) => {
                let sp: f64 = lens[..=i].iter().sum();
                let s = total - sp;
                diffraction_at = Some((sp, s));
                diffract(tracer, ed, e, k_in, k_out, sp, s)?
            }
            _ => return Err(Error::contract("interaction kind does not match its reference")),
        };
    }

    let amp = match diffraction_at {
        None => 1.0 / total,
        Some((sp, s)) => (1.0 / sp) * (sp / (s * (s + sp))).sqrt(),
    };
    Ok(e.scale(Complex64::from_polar(amp, -k0 * total)))
}

/// Open-circuit voltage (up to a constant) of a vertical receive antenna.
pub fn receive_voltage(e: &CVec3, arrival: Vec3, pattern: AntennaPattern) -> Complex64 {
    e.dot(vertical_polarization(arrival)) * gain_toward(pattern, -arrival).sqrt()
}

/// Power from a coherent sum of voltages, dBm, floored at `floor_dbm`.
pub fn power_from_voltage(v: Complex64, frequency_ghz: f64, floor_dbm: f64) -> f64 {
    let lambda = C0 / (frequency_ghz * 1e9);
    let w = lambda * lambda / (8.0 * std::f64::consts::PI * ETA0) * v.norm_sqr();
    if w > 0.0 {
        watts_to_dbm(w).max(floor_dbm)
    } else {
        floor_dbm
    }
}

/// Received power of the coherent sum of `contributions`, dBm.
pub fn received_power(
    contributions: &[FieldContribution],
    frequency_ghz: f64,
    pattern: AntennaPattern,
    floor_dbm: f64,
) -> f64 {
    let v: Complex64 = contributions
        .iter()
        .map(|c| receive_voltage(&c.e_field, c.arrival, pattern))
        .sum();
    power_from_voltage(v, frequency_ghz, floor_dbm)
}

/// Free-space path loss between isotropic antennas, dB (positive).
pub fn fspl_db(distance_m: f64, frequency_ghz: f64) -> f64 {
    let lambda = C0 / (frequency_ghz * 1e9);
    20.0 * (4.0 * std::f64::consts::PI * distance_m / lambda).log10()
}

/// All field contributions at `rx`.
pub fn trace_fields(tracer: &Tracer<'_>, rx: Vec3) -> Result<Vec<FieldContribution>> {
    tracer
        .trace(rx)?
        .iter()
        .map(|p| path_field(tracer, p))
        .collect()
}
