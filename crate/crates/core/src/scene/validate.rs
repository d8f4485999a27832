use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{is_convex_ccw, point_polygon_distance, polygon_distance};
use crate::scene::materials;
use crate::scene::types::{ObstacleKind, Scene};

/// Distances may fall short of a rule by this much (floating point slack).
const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Footprint,
    Cylinder,
    Height,
    Material,
    WallClearance,
    PairwiseClearance,
    TxExclusion,
    Transmitter,
    ReceiverGrid,
    Frequency,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Footprint => "footprint",
            Rule::Cylinder => "cylinder",
            Rule::Height => "height",
            Rule::Material => "material",
            Rule::WallClearance => "wall clearance",
            Rule::PairwiseClearance => "pairwise clearance",
            Rule::TxExclusion => "tx exclusion",
            Rule::Transmitter => "transmitter",
            Rule::ReceiverGrid => "receiver grid",
            Rule::Frequency => "frequency",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// Offending obstacle indices (or grid indices for receiver-grid violations).
    pub objects: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}: {}", self.rule, self.objects, self.detail)
    }
}

/// Lists every invariant the scene breaks; empty when valid.
pub fn validate_scene(s: &Scene) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |rule, objects: Vec<usize>, detail: String| {
        out.push(Violation {
            rule,
            objects,
            detail,
        })
    };
    let room = &s.room;

    if !(s.frequency_ghz > 0.0 && s.frequency_ghz.is_finite()) {
        push(Rule::Frequency, vec![], format!("{} GHz", s.frequency_ghz));
    }
    for name in [&room.wall_material, &room.floor_material, &room.ceiling_material] {
        if materials::by_name(name).is_none() {
            push(Rule::Material, vec![], format!("unknown room material '{name}'"));
        }
    }

    for (i, o) in s.obstacles.iter().enumerate() {
        if !is_convex_ccw(&o.footprint) || o.area() <= 1e-6 {
            push(
                Rule::Footprint,
                vec![i],
                format!("footprint must be convex, counterclockwise, area > 1e-6 (area {:.3e})", o.area()),
            );
            continue;
        }
        if o.kind == ObstacleKind::Cylinder20 {
            let c = o.centroid();
            let r: Vec<f64> = o.footprint.iter().map(|v| (*v - c).norm()).collect();
            let spread = r.iter().cloned().fold(f64::MIN, f64::max) - r.iter().cloned().fold(f64::MAX, f64::min);
            if o.footprint.len() != 20 || spread > 1e-9 {
                push(
                    Rule::Cylinder,
                    vec![i],
                    format!("{} vertices, radius spread {spread:.3e} m", o.footprint.len()),
                );
            }
        }
        if !(o.height > 0.0 && o.height < room.height) {
            push(Rule::Height, vec![i], format!("height {} m", o.height));
        }
        if materials::by_name(&o.material).is_none() {
            push(Rule::Material, vec![i], format!("unknown material '{}'", o.material));
        }
        let c = s.rules.wall_clearance;
        let inside = o.footprint.iter().all(|v| {
            v.x >= c - SLACK && v.x <= room.width - c + SLACK && v.y >= c - SLACK && v.y <= room.depth - c + SLACK
        });
        if !inside {
            push(Rule::WallClearance, vec![i], format!("closer than {c} m to a wall"));
        }
        let d = point_polygon_distance(&o.footprint, s.tx.position.xy());
        if d < s.rules.tx_exclusion_radius - SLACK {
            push(
                Rule::TxExclusion,
                vec![i],
                format!("{d:.3} m from the transmitter, exclusion radius {}", s.rules.tx_exclusion_radius),
            );
        }
    }

    let n = s.obstacles.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&s.obstacles[i].footprint, &s.obstacles[j].footprint);
            if a.len() < 3 || b.len() < 3 {
                continue;
            }
            let d = polygon_distance(a, b);
            if d < s.rules.clearance - SLACK {
                push(
                    Rule::PairwiseClearance,
                    vec![i, j],
                    format!("{d:.3} m apart, minimum {}", s.rules.clearance),
                );
            }
        }
    }

    if !room.contains_strictly(s.tx.position) || !s.tx.power_dbm.is_finite() {
        push(Rule::Transmitter, vec![], format!("{:?}", s.tx));
    }
    for (g, grid) in s.rx_grids.iter().enumerate() {
        let ok_dims = grid.nx > 0 && grid.ny > 0 && grid.spacing_x > 0.0 && grid.spacing_y > 0.0;
        let corners_inside = ok_dims
            && room.contains_strictly(grid.point(0, 0))
            && room.contains_strictly(grid.point(grid.nx - 1, grid.ny - 1));
        if !corners_inside {
            push(Rule::ReceiverGrid, vec![g], "grid empty or not strictly inside the room".into());
        }
    }
    out
}
