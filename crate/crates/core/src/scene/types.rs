use serde::{Deserialize, Serialize};

use crate::geometry::{centroid, signed_area, Vector2, Vector3};
use crate::scene::materials::{self, MaterialSpec};
use crate::{Vec2, Vec3};

pub const SCENE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    /// Interior extent along x, meters.
    pub width: f64,
    /// Interior extent along y, meters.
    pub depth: f64,
    /// Floor to ceiling, meters.
    pub height: f64,
    pub wall_thickness: f64,
    pub wall_material: String,
    pub floor_material: String,
    pub ceiling_material: String,
}

impl Default for Room {
    fn default() -> Self {
        Self {
            width: 17.0,
            depth: 10.0,
            height: 3.0,
            wall_thickness: 0.2,
            wall_material: "concrete".into(),
            floor_material: "concrete".into(),
            ceiling_material: "concrete".into(),
        }
    }
}

impl Room {
    pub fn center(&self) -> Vec2 {
        Vec2::new(self.width / 2.0, self.depth / 2.0)
    }

    pub fn contains_strictly(&self, p: Vec3) -> bool {
        p.x > 0.0 && p.x < self.width && p.y > 0.0 && p.y < self.depth && p.z > 0.0 && p.z < self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObstacleKind {
    Cuboid,
    Cylinder20,
}

/// Vertical prism standing on the floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub kind: ObstacleKind,
    /// Convex, counterclockwise.
    pub footprint: Vec<Vec2>,
    pub height: f64,
    pub material: String,
}

impl Obstacle {
    pub fn area(&self) -> f64 {
        signed_area(&self.footprint)
    }

    pub fn centroid(&self) -> Vec2 {
        centroid(&self.footprint)
    }

    /// Region used for spacing rules. Cylinders use their axis-aligned bounding square.
    pub fn clearance_zone(&self) -> Vec<Vec2> {
        match self.kind {
            ObstacleKind::Cuboid => self.footprint.clone(),
            ObstacleKind::Cylinder20 => {
                let c = self.centroid();
                let r = self
                    .footprint
                    .iter()
                    .map(|v| (*v - c).norm())
                    .fold(0.0, f64::max);
                vec![
                    Vec2::new(c.x - r, c.y - r),
                    Vec2::new(c.x + r, c.y - r),
                    Vec2::new(c.x + r, c.y + r),
                    Vec2::new(c.x - r, c.y + r),
                ]
            }
        }
    }

    pub fn material_spec(&self) -> Option<&'static MaterialSpec> {
        materials::by_name(&self.material)
    }

    /// Strictly inside the solid, beyond `tol` from every face.
    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        p.z > tol
            && p.z < self.height - tol
            && crate::geometry::convex_inset(&self.footprint, p.xy()) > tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntennaPattern {
    /// Vertical half-wave dipole.
    HalfWaveDipole,
    Isotropic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmitterSpec {
    pub position: Vec3,
    pub power_dbm: f64,
    pub pattern: AntennaPattern,
}

/// Regular receiver lattice on a horizontal plane. Point `(i, j)` sits at
/// `origin + (i * spacing_x, j * spacing_y)`; flat index is `j * nx + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverGrid {
    pub origin: Vec2,
    pub nx: usize,
    pub ny: usize,
    pub spacing_x: f64,
    pub spacing_y: f64,
    pub height: f64,
    pub pattern: AntennaPattern,
}

impl ReceiverGrid {
    /// Grid centred in the room, spacing shrunk where needed to keep `margin` from the walls.
    pub fn centered(room: &Room, height: f64, nx: usize, ny: usize, nominal: f64, margin: f64) -> Self {
        let fit = |extent: f64, n: usize| {
            if n < 2 {
                nominal
            } else {
                nominal.min((extent - 2.0 * margin) / (n - 1) as f64)
            }
        };
        let spacing_x = fit(room.width, nx);
        let spacing_y = fit(room.depth, ny);
        let span = |s: f64, n: usize| s * n.saturating_sub(1) as f64;
        Self {
            origin: Vec2::new(
                (room.width - span(spacing_x, nx)) / 2.0,
                (room.depth - span(spacing_y, ny)) / 2.0,
            ),
            nx,
            ny,
            spacing_x,
            spacing_y,
            height,
            pattern: AntennaPattern::Isotropic,
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Vec3 {
        Vector3::new(
            self.origin.x + i as f64 * self.spacing_x,
            self.origin.y + j as f64 * self.spacing_y,
            self.height,
        )
    }

    #[inline]
    pub fn point_at(&self, idx: usize) -> Vec3 {
        self.point(idx % self.nx, idx / self.nx)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(|k| self.point_at(k))
    }
}

/// Spacing rules a scene was generated under; `validate_scene` checks against them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRules {
    pub clearance: f64,
    pub wall_clearance: f64,
    pub tx_exclusion_radius: f64,
}

impl Default for PlacementRules {
    fn default() -> Self {
        Self {
            clearance: 0.5,
            wall_clearance: 0.5,
            tx_exclusion_radius: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub version: u32,
    pub seed: u64,
    pub frequency_ghz: f64,
    pub room: Room,
    pub rules: PlacementRules,
    pub obstacles: Vec<Obstacle>,
    pub tx: TransmitterSpec,
    pub rx_grids: Vec<ReceiverGrid>,
}

pub const GRID_HEIGHTS: [f64; 2] = [0.765, 1.06];
pub const TX_HEIGHT: f64 = 1.6;

impl Scene {
    /// Unfurnished default room with the standard transmitter and receiver grids.
    pub fn empty(frequency_ghz: f64) -> Self {
        let room = Room::default();
        let c = room.center();
        let rx_grids = GRID_HEIGHTS
            .iter()
            .map(|&h| ReceiverGrid::centered(&room, h, 115, 65, 0.15, 0.1))
            .collect();
        Self {
            version: SCENE_VERSION,
            seed: 0,
            frequency_ghz,
            tx: TransmitterSpec {
                position: Vector3::new(c.x, c.y, TX_HEIGHT),
                power_dbm: 0.0,
                pattern: AntennaPattern::HalfWaveDipole,
            },
            room,
            rules: PlacementRules::default(),
            obstacles: Vec::new(),
            rx_grids,
        }
    }

    pub fn grid(&self, index: usize) -> crate::Result<&ReceiverGrid> {
        self.rx_grids.get(index).ok_or_else(|| {
            crate::Error::contract(format!(
                "grid index {index} out of range ({} grids)",
                self.rx_grids.len()
            ))
        })
    }

    pub fn without_obstacles(&self) -> Self {
        Self {
            obstacles: Vec::new(),
            ..self.clone()
        }
    }

    pub fn with_frequency(&self, frequency_ghz: f64) -> Self {
        Self {
            frequency_ghz,
            ..self.clone()
        }
    }

    /// Mirror image of the scene: `flip_x` maps `x -> W - x`, `flip_y` maps `y -> D - y`.
    ///
    /// Footprints are re-ordered to stay counterclockwise. The receiver grids are
    /// symmetric about the room centre so they are unchanged.
    pub fn mirrored(&self, flip_x: bool, flip_y: bool) -> Self {
        let (w, d) = (self.room.width, self.room.depth);
        let map = |p: Vec2| {
            Vector2::new(
                if flip_x { w - p.x } else { p.x },
                if flip_y { d - p.y } else { p.y },
            )
        };
        let mut out = self.clone();
        for o in &mut out.obstacles {
            o.footprint = o.footprint.iter().map(|&p| map(p)).collect();
            if flip_x != flip_y {
                o.footprint.reverse();
            }
        }
        let t = map(self.tx.position.xy());
        out.tx.position = t.extend(self.tx.position.z);
        out
    }
}
