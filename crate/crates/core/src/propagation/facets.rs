//! Planar facets, obstacle solids and diffracting edges prepared from a scene.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagation::fresnel::Surface;
use crate::propagation::utd::{Wedge, WedgeFaces};
use crate::scene::materials::{self, MaterialSpec};
use crate::scene::Scene;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetOwner {
    /// 0..4 walls (x = 0, x = W, y = 0, y = D), 4 floor, 5 ceiling.
    Room(usize),
    /// Side face `face` of obstacle `obstacle`; `face == vertex count` is the top.
    Obstacle { obstacle: usize, face: usize },
}

#[derive(Debug, Clone)]
pub struct Facet {
    pub id: usize,
    pub owner: FacetOwner,
    /// Unit normal pointing to the side rays reflect into.
    pub normal: Vec3,
    /// Plane `normal . x = offset`.
    pub offset: f64,
    pub polygon: Vec<Vec3>,
    /// In-plane inward edge normals: inside when `m . p - c >= 0` for all.
    edge_planes: Vec<(Vec3, f64)>,
    pub surface: Surface,
}

impl Facet {
    fn new(id: usize, owner: FacetOwner, normal: Vec3, polygon: Vec<Vec3>, surface: Surface) -> Self {
        let offset = normal.dot(polygon[0]);
        let c = polygon.iter().fold(Vec3::zero(), |acc, &p| acc + p) / polygon.len() as f64;
        let edge_planes = (0..polygon.len())
            .map(|i| {
                let (a, b) = (polygon[i], polygon[(i + 1) % polygon.len()]);
                let mut m = normal.cross(b - a).normalize();
                if m.dot(c - a) < 0.0 {
                    m = -m;
                }
                (m, m.dot(a))
            })
            .collect();
        Self {
            id,
            owner,
            normal,
            offset,
            polygon,
            edge_planes,
            surface,
        }
    }

    /// Signed height of `p` above the plane (positive on the reflecting side).
    #[inline]
    pub fn side(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    /// Smallest in-plane distance from `p` to an edge; negative outside.
    #[inline]
    pub fn inset(&self, p: Vec3) -> f64 {
        self.edge_planes
            .iter()
            .map(|(m, c)| m.dot(p) - c)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_room(&self) -> bool {
        matches!(self.owner, FacetOwner::Room(_))
    }

    pub fn coplanar(&self, o: &Facet) -> bool {
        (self.normal - o.normal).norm() < 1e-12 && (self.offset - o.offset).abs() < 1e-12
    }
}

/// Obstacle volume as an intersection of half-spaces `n . x <= d`.
#[derive(Debug, Clone)]
pub struct Prism {
    pub planes: Vec<(Vec3, f64, Option<usize>)>,
    pub lo: Vec3,
    pub hi: Vec3,
    pub surface: Surface,
    /// Complex refractive index `sqrt(eps_c)`.
    pub index: Complex64,
}

/// One pass of a segment through an obstacle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub obstacle: usize,
    pub t_in: f64,
    pub t_out: f64,
    pub entry_facet: usize,
    pub exit_facet: usize,
}

impl Prism {
    #[inline]
    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        p.x > self.lo.x
            && p.x < self.hi.x
            && p.y > self.lo.y
            && p.y < self.hi.y
            && p.z > self.lo.z
            && p.z < self.hi.z
            && self.planes.iter().all(|(n, d, _)| n.dot(p) - d < -tol)
    }

    /// Parameter interval of `a + t (b - a)`, `t` in `[0, 1]`, inside the solid,
    /// with the planes limiting it.
    #[inline]
    fn clip(&self, a: Vec3, d: Vec3) -> Option<(f64, f64, usize, usize)> {
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        let (mut p_in, mut p_out) = (usize::MAX, usize::MAX);
        for (k, (n, off, _)) in self.planes.iter().enumerate() {
            let num = off - n.dot(a);
            let den = n.dot(d);
            if den.abs() < 1e-300 {
                if num < 0.0 {
                    return None;
                }
                continue;
            }
            let t = num / den;
            if den < 0.0 {
                if t > t0 {
                    t0 = t;
                    p_in = k;
                }
            } else if t < t1 {
                t1 = t;
                p_out = k;
            }
            if t0 >= t1 {
                return None;
            }
        }
        Some((t0, t1, p_in, p_out))
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub wedge: Wedge,
    pub faces: WedgeFaces,
    pub obstacle: usize,
}

#[derive(Debug, Clone)]
pub struct SceneGeometry {
    pub facets: Vec<Facet>,
    pub prisms: Vec<Prism>,
    /// Vertical edges of every obstacle, followed by the top edges.
    pub edges: Vec<Edge>,
    /// Number of leading entries of `edges` that are vertical.
    pub vertical_edges: usize,
    pub frequency_ghz: f64,
}

fn surface_of(m: &MaterialSpec, f_ghz: f64) -> Result<Surface> {
    if m.perfect_conductor {
        Ok(Surface::Pec)
    } else {
        Ok(Surface::Dielectric(m.complex_permittivity(f_ghz)?))
    }
}

fn lookup(name: &str) -> Result<&'static MaterialSpec> {
    materials::by_name(name).ok_or_else(|| Error::Validation(format!("unknown material '{name}'")))
}

impl SceneGeometry {
    pub fn build(scene: &Scene) -> Result<Self> {
        let f = scene.frequency_ghz;
        let room = &scene.room;
        let (w, d, h) = (room.width, room.depth, room.height);
        let mut facets = Vec::new();
        {
            let wall = surface_of(lookup(&room.wall_material)?, f)?;
            let floor = surface_of(lookup(&room.floor_material)?, f)?;
            let ceiling = surface_of(lookup(&room.ceiling_material)?, f)?;
            let v = Vec3::new;
            let specs = [
                (v(1.0, 0.0, 0.0), vec![v(0.0, 0.0, 0.0), v(0.0, d, 0.0), v(0.0, d, h), v(0.0, 0.0, h)], wall),
                (v(-1.0, 0.0, 0.0), vec![v(w, 0.0, 0.0), v(w, 0.0, h), v(w, d, h), v(w, d, 0.0)], wall),
                (v(0.0, 1.0, 0.0), vec![v(0.0, 0.0, 0.0), v(0.0, 0.0, h), v(w, 0.0, h), v(w, 0.0, 0.0)], wall),
                (v(0.0, -1.0, 0.0), vec![v(0.0, d, 0.0), v(w, d, 0.0), v(w, d, h), v(0.0, d, h)], wall),
                (v(0.0, 0.0, 1.0), vec![v(0.0, 0.0, 0.0), v(w, 0.0, 0.0), v(w, d, 0.0), v(0.0, d, 0.0)], floor),
                (v(0.0, 0.0, -1.0), vec![v(0.0, 0.0, h), v(0.0, d, h), v(w, d, h), v(w, 0.0, h)], ceiling),
            ];
            for (k, (n, poly, s)) in specs.into_iter().enumerate() {
                facets.push(Facet::new(facets.len(), FacetOwner::Room(k), n, poly, s));
            }
        }

        let mut prisms = Vec::new();
        let mut edges = Vec::new();
        let mut top_edges = Vec::new();
        for (oi, o) in scene.obstacles.iter().enumerate() {
            let m = lookup(&o.material)?;
            let surface = surface_of(m, f)?;
            let fp = &o.footprint;
            let nv = fp.len();
            let mut planes = Vec::with_capacity(nv + 2);
            for i in 0..nv {
                let (a, b) = (fp[i], fp[(i + 1) % nv]);
                let t = (b - a).normalize();
                let n = Vec3::new(t.y, -t.x, 0.0);
                let poly = vec![a.extend(0.0), b.extend(0.0), b.extend(o.height), a.extend(o.height)];
                let id = facets.len();
                facets.push(Facet::new(id, FacetOwner::Obstacle { obstacle: oi, face: i }, n, poly, surface));
                planes.push((n, n.dot(a.extend(0.0)), Some(id)));
            }
            let top_id = facets.len();
            facets.push(Facet::new(
                top_id,
                FacetOwner::Obstacle { obstacle: oi, face: nv },
                Vec3::unit_z(),
                fp.iter().map(|p| p.extend(o.height)).collect(),
                surface,
            ));
            planes.push((Vec3::unit_z(), o.height, Some(top_id)));
            planes.push((-Vec3::unit_z(), 0.0, None));
            let lo = fp.iter().fold(Vec3::new(f64::MAX, f64::MAX, 0.0), |l, p| {
                Vec3::new(l.x.min(p.x), l.y.min(p.y), 0.0)
            });
            let hi = fp.iter().fold(Vec3::new(f64::MIN, f64::MIN, o.height), |l, p| {
                Vec3::new(l.x.max(p.x), l.y.max(p.y), o.height)
            });
            let index = match surface {
                Surface::Pec => Complex64::new(0.0, 0.0),
                Surface::Dielectric(eps) => eps.sqrt(),
            };
            prisms.push(Prism {
                planes,
                lo,
                hi,
                surface,
                index,
            });

            let faces = WedgeFaces {
                face0: surface,
                face_n: surface,
            };
            for i in 0..nv {
                let prev = fp[(i + nv - 1) % nv];
                let (v, next) = (fp[i], fp[(i + 1) % nv]);
                let t0 = (next - v).normalize();
                let tn = (prev - v).normalize();
                let interior = t0.dot(tn).clamp(-1.0, 1.0).acos();
                let n = (2.0 * std::f64::consts::PI - interior) / std::f64::consts::PI;
                edges.push(Edge {
                    wedge: Wedge::new(v.extend(o.height), -Vec3::unit_z(), o.height, t0.extend(0.0), n),
                    faces,
                    obstacle: oi,
                });
            }
            for i in 0..nv {
                let (a, b) = (fp[i], fp[(i + 1) % nv]);
                let e = (b - a).normalize();
                let inward = Vec3::new(-e.y, e.x, 0.0);
                top_edges.push(Edge {
                    wedge: Wedge::new(a.extend(o.height), e.extend(0.0), (b - a).norm(), inward, 1.5),
                    faces,
                    obstacle: oi,
                });
            }
        }
        let vertical_edges = edges.len();
        edges.extend(top_edges);
        Ok(Self {
            facets,
            prisms,
            edges,
            vertical_edges,
            frequency_ghz: f,
        })
    }

    /// Obstacles passed through by the segment `a -> b`, ordered along it.
    /// Passes shorter than `1e-9` m (touching a face or edge) are ignored.
    pub fn crossings(&self, a: Vec3, b: Vec3, out: &mut Vec<Crossing>) {
        out.clear();
        let d = b - a;
        let len = d.norm();
        let lo = Vec3::new(a.x.min(b.x), a.y.min(b.y), a.z.min(b.z));
        let hi = Vec3::new(a.x.max(b.x), a.y.max(b.y), a.z.max(b.z));
        for (oi, p) in self.prisms.iter().enumerate() {
            if hi.x < p.lo.x || lo.x > p.hi.x || hi.y < p.lo.y || lo.y > p.hi.y || hi.z < p.lo.z || lo.z > p.hi.z {
                continue;
            }
            if let Some((t0, t1, k_in, k_out)) = p.clip(a, d) {
                if (t1 - t0) * len <= 1e-9 || k_in == usize::MAX || k_out == usize::MAX {
                    continue;
                }
                let (Some(fi), Some(fo)) = (p.planes[k_in].2, p.planes[k_out].2) else {
                    continue;
                };
                out.push(Crossing {
                    obstacle: oi,
                    t_in: t0,
                    t_out: t1,
                    entry_facet: fi,
                    exit_facet: fo,
                });
            }
        }
        if out.len() > 1 {
            out.sort_by(|x, y| x.t_in.total_cmp(&y.t_in));
        }
    }

    /// Index of an obstacle strictly containing `p`.
    pub fn obstacle_containing(&self, p: Vec3, tol: f64) -> Option<usize> {
        self.prisms.iter().position(|pr| pr.contains(p, tol))
    }
}
