#![allow(dead_code)]

use num_complex::Complex64;
use roomwave::propagation::field::{trace_fields, CVec3};
use roomwave::propagation::{PropagationConfig, Tracer};
use roomwave::scene::generate::rectangle;
use roomwave::scene::{AntennaPattern, Obstacle, ObstacleKind, Scene};
use roomwave::{Vec2, Vec3};

/// Unfurnished room with isotropic antennas at both ends.
pub fn isotropic_room(f_ghz: f64) -> Scene {
    let mut s = Scene::empty(f_ghz);
    s.tx.pattern = AntennaPattern::Isotropic;
    for g in &mut s.rx_grids {
        g.pattern = AntennaPattern::Isotropic;
    }
    s
}

pub fn free_space_config() -> PropagationConfig {
    PropagationConfig {
        include_walls: false,
        ..PropagationConfig::default()
    }
}

/// A 1 m square PEC column spanning x 8..9, y 4.5..5.5, 2.9 m tall.
pub fn pec_column_scene(f_ghz: f64) -> Scene {
    let mut s = isotropic_room(f_ghz);
    s.obstacles.push(Obstacle {
        kind: ObstacleKind::Cuboid,
        footprint: rectangle(Vec2::new(8.5, 5.0), 1.0, 1.0, 0.0),
        height: 2.9,
        material: "pec".into(),
    });
    s.tx.position = Vec3::new(7.0, 6.0, 1.5);
    s
}

/// Coherent sum of every path's field at `rx`.
pub fn total_field(tracer: &Tracer<'_>, rx: Vec3) -> CVec3 {
    let zero = num_complex::Complex64::new(0.0, 0.0);
    trace_fields(tracer, rx)
        .unwrap()
        .iter()
        .fold(CVec3 { x: zero, y: zero, z: zero }, |acc, c| acc.add(&c.e_field))
}

pub fn diff_norm(a: &CVec3, b: &CVec3) -> f64 {
    ((a.x - b.x).norm_sqr() + (a.y - b.y).norm_sqr() + (a.z - b.z).norm_sqr()).sqrt()
}

/// Lengths of all specular paths with at most `order` reflections in an
/// empty `w x d x h` box, by brute-force mirror enumeration. A path counts
/// only if every reflection point lies inside its face.
pub fn mirror_oracle(w: f64, d: f64, h: f64, tx: Vec3, rx: Vec3, order: usize) -> Vec<f64> {
    // (axis, plane coordinate)
    let planes = [(0usize, 0.0), (0, w), (1, 0.0), (1, d), (2, 0.0), (2, h)];
    let mut seqs: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier = seqs.clone();
    for _ in 0..order {
        let mut next = Vec::new();
        for s in &frontier {
            for p in 0..6 {
                if s.last() != Some(&p) {
                    let mut t = s.clone();
                    t.push(p);
                    next.push(t);
                }
            }
        }
        seqs.extend(next.iter().cloned());
        frontier = next;
    }
    let get = |v: Vec3, a: usize| [v.x, v.y, v.z][a];
    let set = |v: Vec3, a: usize, x: f64| {
        let mut c = [v.x, v.y, v.z];
        c[a] = x;
        Vec3::new(c[0], c[1], c[2])
    };
    let bounds = [w, d, h];
    let mut out = Vec::new();
    'seq: for s in seqs {
        let mut images = vec![tx];
        for &p in &s {
            let (a, c) = planes[p];
            let last = *images.last().unwrap();
            images.push(set(last, a, 2.0 * c - get(last, a)));
        }
        let length = (rx - *images.last().unwrap()).norm();
        // Walk back from the receiver.
        let mut target = rx;
        for k in (0..s.len()).rev() {
            let (a, c) = planes[s[k]];
            let img = images[k + 1];
            let (pi, pt) = (get(img, a), get(target, a));
            if (pi - c) * (pt - c) >= 0.0 {
                continue 'seq;
            }
            let t = (c - pt) / (pi - pt);
            let q = target + (img - target) * t;
            for b in 0..3 {
                if b != a && !(get(q, b) > 0.0 && get(q, b) < bounds[b]) {
                    continue 'seq;
                }
            }
            target = q;
        }
        out.push(length);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Deviation at the first lit sample from the linear extrapolation of the two
/// shadowed samples before it, relative to its magnitude.
pub fn shadow_boundary_discontinuity(max_diffractions: usize) -> f64 {
    let scene = pec_column_scene(28.0);
    let cfg = PropagationConfig {
        include_walls: false,
        ..PropagationConfig::new(1, 0, max_diffractions)
    };
    let tracer = Tracer::new(&scene, &cfg).unwrap();
    let corner = Vec3::new(9.0, 5.5, 1.5);
    let isb = (-0.5f64).atan2(2.0).to_degrees();
    let at = |deg: f64| {
        let a = deg.to_radians();
        total_field(&tracer, corner + Vec3::new(a.cos(), a.sin(), 0.0))
    };
    let lo = (isb * 10.0).floor() / 10.0;
    let (a, b, c) = (at(lo - 0.1), at(lo), at(lo + 0.1));
    let pred = b.scale(Complex64::new(2.0, 0.0)).add(&a.scale(Complex64::new(-1.0, 0.0)));
    diff_norm(&pred, &c) / c.norm()
}
