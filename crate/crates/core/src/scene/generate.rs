//! Random furnished floorplans by rejection sampling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_polygon_distance, polygon_distance};
use crate::scene::materials::FURNITURE;
use crate::scene::types::{Obstacle, ObstacleKind, PlacementRules, Scene, GRID_HEIGHTS};
use crate::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationParams {
    pub frequency_ghz: f64,
    pub count_min: usize,
    pub count_max: usize,
    pub cuboid_side_min: f64,
    pub cuboid_side_max: f64,
    pub cylinder_radius_min: f64,
    pub cylinder_radius_max: f64,
    /// Probability that an object is a cylinder.
    pub cylinder_fraction: f64,
    pub rotate_cuboids: bool,
    pub obstacle_height: f64,
    pub rules: PlacementRules,
    pub materials: Vec<String>,
    pub max_attempts_per_object: usize,
    pub max_restarts: usize,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            frequency_ghz: 28.0,
            count_min: 8,
            count_max: 16,
            cuboid_side_min: 0.8,
            cuboid_side_max: 2.0,
            cylinder_radius_min: 0.5,
            cylinder_radius_max: 0.8,
            cylinder_fraction: 0.5,
            rotate_cuboids: true,
            obstacle_height: 0.76,
            rules: PlacementRules::default(),
            materials: FURNITURE.iter().map(|s| s.to_string()).collect(),
            max_attempts_per_object: 10_000,
            max_restarts: 50,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.count_min > self.count_max {
            return bad("count_min exceeds count_max");
        }
        if !(self.cuboid_side_min > 0.0 && self.cuboid_side_min <= self.cuboid_side_max) {
            return bad("cuboid side range must be positive and ordered");
        }
        if !(self.cylinder_radius_min > 0.0 && self.cylinder_radius_min <= self.cylinder_radius_max) {
            return bad("cylinder radius range must be positive and ordered");
        }
        if !(0.0..=1.0).contains(&self.cylinder_fraction) {
            return bad("cylinder_fraction must lie in [0, 1]");
        }
        if self.materials.is_empty() {
            return bad("material list is empty");
        }
        for m in &self.materials {
            if crate::scene::materials::by_name(m).is_none() {
                return Err(Error::Config(format!("unknown material '{m}'")));
            }
        }
        if self.max_attempts_per_object == 0 {
            return bad("max_attempts_per_object must be at least 1");
        }
        Ok(())
    }
}

/// Regular 20-gon, vertices counterclockwise starting on the +x axis.
pub fn cylinder20(center: Vec2, radius: f64) -> Vec<Vec2> {
    (0..20)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 20.0;
            Vec2::new(center.x + radius * a.cos(), center.y + radius * a.sin())
        })
        .collect()
}

/// Rectangle `a x b` centred at `center`, rotated by `angle`, counterclockwise.
pub fn rectangle(center: Vec2, a: f64, b: f64, angle: f64) -> Vec<Vec2> {
    let (ha, hb) = (a / 2.0, b / 2.0);
    [(-ha, -hb), (ha, -hb), (ha, hb), (-ha, hb)]
        .iter()
        .map(|&(x, y)| center + Vec2::new(x, y).rotate(angle))
        .collect()
}

struct Shape {
    kind: ObstacleKind,
    /// Footprint relative to the origin.
    local: Vec<Vec2>,
    material: String,
}

fn draw_shape(rng: &mut ChaCha8Rng, p: &GenerationParams) -> Shape {
    let kind = if rng.gen_bool(p.cylinder_fraction) {
        ObstacleKind::Cylinder20
    } else {
        ObstacleKind::Cuboid
    };
    let local = match kind {
        ObstacleKind::Cylinder20 => {
            let r = rng.gen_range(p.cylinder_radius_min..=p.cylinder_radius_max);
            cylinder20(Vec2::new(0.0, 0.0), r)
        }
        ObstacleKind::Cuboid => {
            let a = rng.gen_range(p.cuboid_side_min..=p.cuboid_side_max);
            let b = rng.gen_range(p.cuboid_side_min..=p.cuboid_side_max);
            let angle = if p.rotate_cuboids {
                rng.gen_range(0.0..std::f64::consts::PI)
            } else {
                0.0
            };
            rectangle(Vec2::new(0.0, 0.0), a, b, angle)
        }
    };
    let material = p.materials.choose(rng).expect("non-empty").clone();
    Shape { kind, local, material }
}

fn try_place(
    rng: &mut ChaCha8Rng,
    p: &GenerationParams,
    scene: &Scene,
    shape: &Shape,
) -> std::result::Result<Obstacle, &'static str> {
    let room = &scene.room;
    let probe = Obstacle {
        kind: shape.kind,
        footprint: shape.local.clone(),
        height: p.obstacle_height,
        material: shape.material.clone(),
    };
    let zone = probe.clearance_zone();
    let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
    for v in &zone {
        lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    let c = p.rules.wall_clearance;
    let (x0, x1) = (c - lo.x, room.width - c - hi.x);
    let (y0, y1) = (c - lo.y, room.depth - c - hi.y);
    if x0 > x1 || y0 > y1 {
        return Err("wall clearance");
    }
    let tx = scene.tx.position.xy();
    let zones: Vec<Vec<Vec2>> = scene.obstacles.iter().map(Obstacle::clearance_zone).collect();
    let mut last = "pairwise clearance";
    for _ in 0..p.max_attempts_per_object {
        let at = Vec2::new(rng.gen_range(x0..=x1), rng.gen_range(y0..=y1));
        let footprint: Vec<Vec2> = shape.local.iter().map(|&v| v + at).collect();
        if point_polygon_distance(&footprint, tx) < p.rules.tx_exclusion_radius {
            last = "tx exclusion";
            continue;
        }
        let placed_zone: Vec<Vec2> = zone.iter().map(|&v| v + at).collect();
        if zones
            .iter()
            .any(|z| polygon_distance(z, &placed_zone) < p.rules.clearance)
        {
            last = "pairwise clearance";
            continue;
        }
        return Ok(Obstacle {
            footprint,
            ..probe
        });
    }
    Err(last)
}

/// Generates a furnished scene. A pure function of `(seed, params)`.
pub fn generate_scene(seed: u64, params: &GenerationParams) -> Result<Scene> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base = Scene::empty(params.frequency_ghz);
    base.seed = seed;
    base.rules = params.rules.clone();
    debug_assert_eq!(base.rx_grids.len(), GRID_HEIGHTS.len());

    let mut failure = ("pairwise clearance", String::new());
    for restart in 0..=params.max_restarts {
        let count = rng.gen_range(params.count_min..=params.count_max);
        let mut scene = base.clone();
        let mut ok = true;
        for k in 0..count {
            let shape = draw_shape(&mut rng, params);
            match try_place(&mut rng, params, &scene, &shape) {
                Ok(o) => scene.obstacles.push(o),
                Err(rule) => {
                    failure = (
                        rule,
                        format!(
                            "object {k} of {count} not placed after {} attempts (restart {restart})",
                            params.max_attempts_per_object
                        ),
                    );
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(scene);
        }
    }
    Err(Error::Generation {
        rule: failure.0,
        detail: failure.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::validate::validate_scene;

    #[test]
    fn same_seed_same_scene() {
        let p = GenerationParams::default();
        let a = generate_scene(0, &p).unwrap();
        let b = generate_scene(0, &p).unwrap();
        assert_eq!(a, b);
        let c = generate_scene(1, &p).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_scene_is_valid() {
        let s = generate_scene(3, &GenerationParams::default()).unwrap();
        assert!(validate_scene(&s).is_empty());
        assert!((8..=16).contains(&s.obstacles.len()));
    }

    #[test]
    fn impossible_request_names_rule() {
        let p = GenerationParams {
            count_min: 60,
            count_max: 60,
            max_attempts_per_object: 50,
            max_restarts: 1,
            ..GenerationParams::default()
        };
        match generate_scene(0, &p) {
            Err(Error::Generation { rule, .. }) => {
                assert!(rule == "pairwise clearance" || rule == "tx exclusion", "{rule}")
            }
            other => panic!("expected generation error, got {other:?}"),
        }
    }

    #[test]
    fn oversized_objects_fail_on_wall_rule() {
        let p = GenerationParams {
            cuboid_side_min: 12.0,
            cuboid_side_max: 12.0,
            cylinder_fraction: 0.0,
            rotate_cuboids: false,
            max_restarts: 0,
            ..GenerationParams::default()
        };
        match generate_scene(0, &p) {
            Err(Error::Generation { rule, .. }) => assert_eq!(rule, "wall clearance"),
            other => panic!("expected generation error, got {other:?}"),
        }
    }
}
