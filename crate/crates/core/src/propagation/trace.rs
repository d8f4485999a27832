//! Path enumeration: beam-traced image tree for reflections, straight-through
//! transmissions, and single diffraction at obstacle edges.

use crate::error::{Error, Result};
use crate::propagation::config::{DiffractionEdges, PropagationConfig, TransmissionCounting};
use crate::propagation::facets::{Crossing, Facet, SceneGeometry};
use crate::propagation::fresnel::Surface;
use crate::propagation::path::{Interaction, InteractionKind, Medium, RayPath, Reference};
use crate::scene::Scene;
use crate::Vec3;

/// Reflection points must lie this close to (or inside) their facet polygon.
pub(crate) const POLY_TOL: f64 = 1e-9;
/// Points closer than this to an obstacle surface are not inside it.
const SOLID_TOL: f64 = 1e-9;
/// Half-space slack when clipping beams; keeps boundary rays in the tree.
const CLIP_TOL: f64 = 1e-9;
/// Diffraction points must stay this far inside the edge and the open wedge.
const EDGE_TOL: f64 = 1e-9;

/// Half-space `m . x >= c`.
pub(crate) type Plane = (Vec3, f64);

/// Reflection sequence from the transmitter. `images[0]` is the transmitter;
/// `images[i]` is its image after the first `i` reflections.
#[derive(Debug, Clone, Default)]
pub(crate) struct Chain {
    pub facets: Vec<usize>,
    pub images: Vec<Vec3>,
}

/// Unit of deterministic work. Results are combined in task order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Task {
    LineOfSight,
    /// Reflection subtree rooted at a first-order facet.
    Subtree(usize),
    /// Every diffraction path at one edge.
    Edge(usize),
}

/// A validated path plus whether any reflection point sits on a facet boundary.
pub(crate) struct Candidate {
    pub path: RayPath,
    pub on_boundary: bool,
}

/// Precomputed scene for repeated tracing at one frequency and configuration.
pub struct Tracer<'s> {
    pub scene: &'s Scene,
    pub config: PropagationConfig,
    pub geo: SceneGeometry,
    reflectors: Vec<usize>,
    room_reflectors: Vec<usize>,
    n_edges: usize,
    pub(crate) tx: Vec3,
    pub k0: f64,
    pub lambda: f64,
}

impl<'s> Tracer<'s> {
    pub fn new(scene: &'s Scene, config: &PropagationConfig) -> Result<Self> {
        config.validate()?;
        let geo = SceneGeometry::build(scene)?;
        let reflectors: Vec<usize> = geo
            .facets
            .iter()
            .filter(|f| config.include_walls || !f.is_room())
            .map(|f| f.id)
            .collect();
        let room_reflectors = reflectors
            .iter()
            .copied()
            .filter(|&i| geo.facets[i].is_room())
            .collect();
        let n_edges = match config.diffraction_edges {
            DiffractionEdges::Vertical => geo.vertical_edges,
            DiffractionEdges::All => geo.edges.len(),
        };
        let tx = scene.tx.position;
        if geo.obstacle_containing(tx, 0.0).is_some() {
            return Err(Error::domain("transmitter is inside an obstacle"));
        }
        let lambda = crate::propagation::field::C0 / (scene.frequency_ghz * 1e9);
        Ok(Self {
            scene,
            config: config.clone(),
            geo,
            reflectors,
            room_reflectors,
            n_edges,
            tx,
            k0: 2.0 * std::f64::consts::PI / lambda,
            lambda,
        })
    }

    pub(crate) fn tasks(&self) -> Vec<Task> {
        let mut t = vec![Task::LineOfSight];
        if self.config.max_reflections > 0 {
            for &f in &self.reflectors {
                if self.geo.facets[f].side(self.tx) > CLIP_TOL {
                    t.push(Task::Subtree(f));
                }
            }
        }
        if self.config.max_diffractions > 0 {
            t.extend((0..self.n_edges).map(Task::Edge));
        }
        t
    }

    pub(crate) fn check_receiver(&self, rx: Vec3) -> Result<()> {
        if !rx.is_finite() {
            return Err(Error::domain("receiver position is not finite"));
        }
        if let Some(o) = self.geo.obstacle_containing(rx, 0.0) {
            return Err(Error::domain(format!(
                "receiver at ({:.3}, {:.3}, {:.3}) is inside obstacle {o}",
                rx.x, rx.y, rx.z
            )));
        }
        if rx.distance(self.tx) < 1e-9 {
            return Err(Error::domain("receiver coincides with the transmitter"));
        }
        Ok(())
    }

    /// Every valid path to `rx`, in deterministic order without duplicates.
    pub fn trace(&self, rx: Vec3) -> Result<Vec<RayPath>> {
        Ok(self.trace_many(&[rx])?.pop().unwrap_or_default())
    }

    /// [`Tracer::trace`] for several receivers with one walk of the image tree.
    pub fn trace_many(&self, rxs: &[Vec3]) -> Result<Vec<Vec<RayPath>>> {
        for &rx in rxs {
            self.check_receiver(rx)?;
        }
        let mut out: Vec<Vec<RayPath>> = vec![Vec::new(); rxs.len()];
        let mut seen: Vec<std::collections::HashSet<Vec<i64>>> = vec![Default::default(); rxs.len()];
        for task in self.tasks() {
            self.run_task(task, &mut |node: Node<'_>| {
                for (k, &rx) in rxs.iter().enumerate() {
                    if let Some(c) = self.validate(&node, rx) {
                        if c.on_boundary && !seen[k].insert(path_key(&c.path)) {
                            continue;
                        }
                        out[k].push(c.path);
                    }
                }
            });
        }
        Ok(out)
    }

    pub(crate) fn run_task(&self, task: Task, visit: &mut dyn FnMut(Node<'_>)) {
        match task {
            Task::LineOfSight => visit(Node::Los),
            Task::Subtree(f) => {
                let facet = &self.geo.facets[f];
                let mut chain = Chain {
                    facets: vec![f],
                    images: vec![self.tx, self.tx.mirror(facet.normal, facet.offset)],
                };
                self.walk(&mut chain, facet.polygon.clone(), visit);
            }
            Task::Edge(e) => self.walk_edge(e, visit),
        }
    }

    fn walk(&self, chain: &mut Chain, aperture: Vec<Vec3>, visit: &mut dyn FnMut(Node<'_>)) {
        let depth = chain.facets.len();
        let f = &self.geo.facets[chain.facets[depth - 1]];
        let s = chain.images[depth];
        let planes = beam_planes(s, &aperture, f);
        visit(Node::Reflection {
            chain,
            beam: &planes,
        });
        if depth >= self.config.max_reflections {
            return;
        }
        for &g in &self.reflectors {
            let fg = &self.geo.facets[g];
            if g == f.id || fg.coplanar(f) || fg.side(s) <= CLIP_TOL {
                continue;
            }
            if !fg.polygon.iter().any(|&p| f.side(p) > CLIP_TOL) {
                continue;
            }
            let clipped = clip_polygon(&fg.polygon, &planes);
            if clipped.len() < 3 || polygon_area(&clipped) < 1e-12 {
                continue;
            }
            chain.facets.push(g);
            chain.images.push(s.mirror(fg.normal, fg.offset));
            self.walk(chain, clipped, visit);
            chain.facets.pop();
            chain.images.pop();
        }
    }

    /// Room-facet reflection sequences usable next to a diffraction.
    /// With `from = Some(p)` each facet must face the previous image of `p`.
    fn side_chains(&self, from: Option<Vec3>, max_len: usize) -> Vec<Chain> {
        let mut out = vec![Chain {
            facets: vec![],
            images: from.into_iter().collect(),
        }];
        let mut frontier = out.clone();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for c in &frontier {
                for &g in &self.room_reflectors {
                    if c.facets.last() == Some(&g) {
                        continue;
                    }
                    let fg = &self.geo.facets[g];
                    let mut n = c.clone();
                    if let Some(&img) = c.images.last() {
                        if fg.side(img) <= CLIP_TOL {
                            continue;
                        }
                        n.images.push(img.mirror(fg.normal, fg.offset));
                    }
                    n.facets.push(g);
                    next.push(n);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    fn walk_edge(&self, e: usize, visit: &mut dyn FnMut(Node<'_>)) {
        let side = self.config.diffraction_side_reflections.min(self.config.max_reflections);
        let pre = self.side_chains(Some(self.tx), side);
        let post = self.side_chains(None, side);
        for p in &pre {
            for q in &post {
                if p.facets.len() + q.facets.len() > self.config.max_reflections {
                    continue;
                }
                visit(Node::Diffraction {
                    edge: e,
                    pre: p,
                    post: &q.facets,
                });
            }
        }
    }

    pub(crate) fn validate(&self, node: &Node<'_>, rx: Vec3) -> Option<Candidate> {
        match *node {
            Node::Los => self.assemble(&[], rx, false),
            Node::Reflection { chain, .. } => self.validate_reflection(chain, rx),
            Node::Diffraction { edge, pre, post } => self.validate_diffraction(edge, pre, post, rx),
        }
    }

    /// Point where the segment `from -> to` crosses facet `f`'s plane, if it
    /// crosses strictly between the endpoints and lands on the facet.
    #[inline]
    fn hit(&self, f: &Facet, from: Vec3, to: Vec3, boundary: &mut bool) -> Option<Vec3> {
        let d = to - from;
        let den = f.normal.dot(d);
        if den.abs() < 1e-300 {
            return None;
        }
        let t = (f.offset - f.normal.dot(from)) / den;
        if !(t > 0.0 && t < 1.0) {
            return None;
        }
        let p = from + d * t;
        let inset = f.inset(p);
        if inset < -POLY_TOL {
            return None;
        }
        if inset <= POLY_TOL {
            *boundary = true;
        }
        if self.geo.obstacle_containing(p, SOLID_TOL).is_some() {
            return None;
        }
        Some(p)
    }

    fn validate_reflection(&self, chain: &Chain, rx: Vec3) -> Option<Candidate> {
        let k = chain.facets.len();
        let last = &self.geo.facets[chain.facets[k - 1]];
        if last.side(rx) <= 0.0 {
            return None;
        }
        let mut pts = [Vec3::zero(); 16];
        let mut pts_vec;
        let pts: &mut [Vec3] = if k <= 16 {
            &mut pts[..k]
        } else {
            pts_vec = vec![Vec3::zero(); k];
            &mut pts_vec
        };
        let mut boundary = false;
        let mut target = rx;
        for i in (0..k).rev() {
            let f = &self.geo.facets[chain.facets[i]];
            let p = self.hit(f, chain.images[i + 1], target, &mut boundary)?;
            pts[i] = p;
            target = p;
        }
        let mut way = Vec::with_capacity(k);
        let mut prev = self.tx;
        for i in 0..k {
            let f = &self.geo.facets[chain.facets[i]];
            let dir = (pts[i] - prev).normalize();
            way.push(Waypoint {
                kind: InteractionKind::Reflect,
                point: pts[i],
                reference: Reference::Facet(f.id),
                angle: dir.dot(f.normal).abs().min(1.0).acos(),
            });
            prev = pts[i];
        }
        self.assemble(&way, rx, boundary)
    }

    fn validate_diffraction(&self, e: usize, pre: &Chain, post: &[usize], rx: Vec3) -> Option<Candidate> {
        let w = &self.geo.edges[e].wedge;
        let q = post.len();
        // Receiver images: m[j] is rx mirrored across post[q-1], ..., post[j].
        let mut m = [Vec3::zero(); 9];
        if q + 1 > m.len() {
            return None;
        }
        m[q] = rx;
        for j in (0..q).rev() {
            let f = &self.geo.facets[post[j]];
            m[j] = m[j + 1].mirror(f.normal, f.offset);
        }
        let s = *pre.images.last()?;
        let r = m[0];
        let along = |p: Vec3| {
            let v = p - w.origin;
            let t = v.dot(w.edge);
            (t, (v - w.edge * t).norm())
        };
        let (ts, rho_s) = along(s);
        let (tr, rho_r) = along(r);
        if rho_s < EDGE_TOL || rho_r < EDGE_TOL {
            return None;
        }
        let tq = ts + (tr - ts) * rho_s / (rho_s + rho_r);
        if !(tq > EDGE_TOL && tq < w.length - EDGE_TOL) {
            return None;
        }
        let qpt = w.origin + w.edge * tq;
        // Unfolded directions equal the real ones next to the edge.
        let s_in = (qpt - s).normalize();
        let s_out = (r - qpt).normalize();
        if !w.is_open(w.angle_of(-s_in), EDGE_TOL) || !w.is_open(w.angle_of(s_out), EDGE_TOL) {
            return None;
        }

        let mut boundary = false;
        let p = pre.facets.len();
        let mut pre_pts = [Vec3::zero(); 8];
        if p > pre_pts.len() {
            return None;
        }
        let mut target = qpt;
        for i in (0..p).rev() {
            let f = &self.geo.facets[pre.facets[i]];
            let hit = self.hit(f, pre.images[i + 1], target, &mut boundary)?;
            pre_pts[i] = hit;
            target = hit;
        }
        let mut post_pts = [Vec3::zero(); 8];
        if q > post_pts.len() {
            return None;
        }
        let mut cur = qpt;
        for j in 0..q {
            let f = &self.geo.facets[post[j]];
            let hit = self.hit(f, cur, m[j], &mut boundary)?;
            post_pts[j] = hit;
            cur = hit;
        }
        if self
            .geo
            .prisms
            .iter()
            .enumerate()
            .any(|(i, pr)| i != self.geo.edges[e].obstacle && pr.contains(qpt, SOLID_TOL))
        {
            return None;
        }

        let mut way = Vec::with_capacity(p + q + 1);
        let mut prev = self.tx;
        for (i, &pt) in pre_pts[..p].iter().enumerate() {
            let f = &self.geo.facets[pre.facets[i]];
            let dir = (pt - prev).normalize();
            way.push(Waypoint {
                kind: InteractionKind::Reflect,
                point: pt,
                reference: Reference::Facet(f.id),
                angle: dir.dot(f.normal).abs().min(1.0).acos(),
            });
            prev = pt;
        }
        way.push(Waypoint {
            kind: InteractionKind::Diffract,
            point: qpt,
            reference: Reference::Edge(e),
            angle: s_in.dot(w.edge).clamp(-1.0, 1.0).acos(),
        });
        prev = qpt;
        for (j, &pt) in post_pts[..q].iter().enumerate() {
            let f = &self.geo.facets[post[j]];
            let dir = (pt - prev).normalize();
            way.push(Waypoint {
                kind: InteractionKind::Reflect,
                point: pt,
                reference: Reference::Facet(f.id),
                angle: dir.dot(f.normal).abs().min(1.0).acos(),
            });
            prev = pt;
        }
        self.assemble(&way, rx, boundary)
    }

    /// Builds the full path through `way`, inserting obstacle transmissions and
    /// enforcing the transmission budget and gain cull.
    fn assemble(&self, way: &[Waypoint], rx: Vec3, on_boundary: bool) -> Option<Candidate> {
        let per = match self.config.transmission_counting {
            TransmissionCounting::Traversals => 1,
            TransmissionCounting::Crossings => 2,
        };
        let mut interactions = Vec::with_capacity(way.len() + 2);
        let mut media = Vec::with_capacity(way.len() + 3);
        let mut crossings: Vec<Crossing> = Vec::new();
        let mut used = 0usize;
        let mut length = 0.0;
        let mut prev = self.tx;
        for k in 0..=way.len() {
            let to = if k < way.len() { way[k].point } else { rx };
            let d = to - prev;
            let seg = d.norm();
            length += seg;
            self.geo.crossings(prev, to, &mut crossings);
            let dir = d / seg;
            for c in &crossings {
                let prism = &self.geo.prisms[c.obstacle];
                if prism.surface == Surface::Pec {
                    return None;
                }
                used += per;
                if used > self.config.max_transmissions {
                    return None;
                }
                let fin = &self.geo.facets[c.entry_facet];
                let fout = &self.geo.facets[c.exit_facet];
                media.push(Medium::Air);
                interactions.push(Interaction {
                    kind: InteractionKind::TransmitIn,
                    point: prev + d * c.t_in,
                    reference: Reference::Facet(c.entry_facet),
                    incidence_angle: dir.dot(fin.normal).abs().min(1.0).acos(),
                });
                media.push(Medium::Obstacle(c.obstacle));
                interactions.push(Interaction {
                    kind: InteractionKind::TransmitOut,
                    point: prev + d * c.t_out,
                    reference: Reference::Facet(c.exit_facet),
                    incidence_angle: dir.dot(fout.normal).abs().min(1.0).acos(),
                });
            }
            media.push(Medium::Air);
            if k < way.len() {
                let w = &way[k];
                interactions.push(Interaction {
                    kind: w.kind,
                    point: w.point,
                    reference: w.reference,
                    incidence_angle: w.angle,
                });
            }
            prev = to;
        }
        let gain_db = 20.0 * (self.lambda / (4.0 * std::f64::consts::PI * length)).log10();
        if gain_db < self.config.min_path_gain_db {
            return None;
        }
        Some(Candidate {
            path: RayPath {
                tx: self.tx,
                rx,
                interactions,
                total_length: length,
                segment_media: media,
            },
            on_boundary,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.n_edges
    }
}

pub(crate) struct Waypoint {
    kind: InteractionKind,
    point: Vec3,
    reference: Reference,
    angle: f64,
}

/// Node of the path search handed to visitors.
pub(crate) enum Node<'a> {
    Los,
    Reflection { chain: &'a Chain, beam: &'a [Plane] },
    Diffraction { edge: usize, pre: &'a Chain, post: &'a [usize] },
}

/// Side planes of the beam from `apex` through `aperture`, plus the front
/// half-space of the facet the aperture lies on.
pub(crate) fn beam_planes(apex: Vec3, aperture: &[Vec3], facet: &Facet) -> Vec<Plane> {
    let n = aperture.len();
    let c = aperture.iter().fold(Vec3::zero(), |a, &p| a + p) / n as f64;
    let mut planes = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (a, b) = (aperture[i], aperture[(i + 1) % n]);
        let m = (a - apex).cross(b - apex);
        let len = m.norm();
        if len < 1e-14 {
            continue;
        }
        let mut m = m / len;
        if m.dot(c - apex) < 0.0 {
            m = -m;
        }
        planes.push((m, m.dot(apex)));
    }
    planes.push((facet.normal, facet.offset));
    planes
}

/// Sutherland-Hodgman clip of a convex polygon by half-spaces `m . x >= c`.
pub(crate) fn clip_polygon(poly: &[Vec3], planes: &[Plane]) -> Vec<Vec3> {
    let mut cur: Vec<Vec3> = poly.to_vec();
    let mut next = Vec::with_capacity(poly.len() + 4);
    for &(m, c) in planes {
        if cur.is_empty() {
            break;
        }
        next.clear();
        let n = cur.len();
        for i in 0..n {
            let a = cur[i];
            let b = cur[(i + 1) % n];
            let da = m.dot(a) - c + CLIP_TOL;
            let db = m.dot(b) - c + CLIP_TOL;
            if da >= 0.0 {
                next.push(a);
            }
            if (da >= 0.0) != (db >= 0.0) {
                let t = da / (da - db);
                next.push(a + (b - a) * t);
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

pub(crate) fn polygon_area(poly: &[Vec3]) -> f64 {
    let mut acc = Vec3::zero();
    for i in 1..poly.len().saturating_sub(1) {
        acc += (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
    }
    0.5 * acc.norm()
}

/// Geometric identity of a path, used to drop duplicates whose reflection
/// points sit on a shared facet boundary.
pub(crate) fn path_key(p: &RayPath) -> Vec<i64> {
    let q = |v: f64| (v * 1e7).round() as i64;
    let mut key = Vec::with_capacity(p.interactions.len() * 4);
    for i in &p.interactions {
        key.push(i.kind as i64);
        key.push(q(i.point.x));
        key.push(q(i.point.y));
        key.push(q(i.point.z));
    }
    key
}

/// Paths to `rx` under `config`, in deterministic order.
pub fn trace_paths(scene: &Scene, rx: Vec3, config: &PropagationConfig) -> Result<Vec<RayPath>> {
    Tracer::new(scene, config)?.trace(rx)
}
