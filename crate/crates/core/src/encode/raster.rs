//! Rasters over the room.
//!
//! Row `j` runs along `y`, column `i` along `x`, and pixel `(i, j)` samples the
//! physical point at its centre. Material rasters cover the room plus its walls
//! with the origin at the outer wall corner `(-t, -t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::convex_inset;
use crate::propagation::antenna::gain_toward;
use crate::propagation::field::C0;
use crate::scene::materials::{self, material_at_frequency};
use crate::scene::Scene;
use crate::Vec2;

use super::{RASTER_HEIGHT, RASTER_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelTag {
    Eps,
    Sigma,
    Fspl,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Eps,
    Sigma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major, `values[j * width + i]`.
    pub values: Vec<f64>,
    /// Pixel pitch `[x, y]`, meters.
    pub meters_per_pixel: [f64; 2],
    pub tag: ChannelTag,
}

impl Raster {
    pub fn new(width: usize, height: usize, values: Vec<f64>, meters_per_pixel: [f64; 2], tag: ChannelTag) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::contract(format!(
                "raster {width}x{height} with {} values",
                values.len()
            )));
        }
        if !(meters_per_pixel[0] > 0.0 && meters_per_pixel[1] > 0.0) {
            return Err(Error::contract("raster scale must be positive"));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("raster value {k} is not finite")));
        }
        Ok(Self {
            width,
            height,
            values,
            meters_per_pixel,
            tag,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64, tag: ChannelTag) -> Self {
        Self {
            width,
            height,
            values: vec![value; width * height],
            meters_per_pixel: [1.0, 1.0],
            tag,
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width + i]
    }

    /// Rows reversed (`vflip`) and/or columns reversed (`hflip`).
    pub fn flipped(&self, vflip: bool, hflip: bool) -> Self {
        let (w, h) = (self.width, self.height);
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..h {
            let sj = if vflip { h - 1 - j } else { j };
            for i in 0..w {
                let si = if hflip { w - 1 - i } else { i };
                values.push(self.values[sj * w + si]);
            }
        }
        Self {
            values,
            ..self.clone()
        }
    }
}

const SUB: usize = 4;

/// Material raster at the standard 1738 x 997 resolution.
pub fn rasterize_property(scene: &Scene, property: Property) -> Result<Raster> {
    rasterize_property_with_dims(scene, property, RASTER_WIDTH, RASTER_HEIGHT)
}

/// Material raster of the room and its walls at any resolution.
///
/// Walls take the wall material, obstacle footprints their own material, and
/// everything else is air (`eps_r = 1`, `sigma = 0`). Pixels straddling a
/// boundary hold the coverage-weighted mean, so the raster is consistent
/// across resolutions.
pub fn rasterize_property_with_dims(scene: &Scene, property: Property, width: usize, height: usize) -> Result<Raster> {
    let f = scene.frequency_ghz;
    let pick = |name: &str| -> Result<f64> {
        let m = materials::by_name(name).ok_or_else(|| Error::Validation(format!("unknown material '{name}'")))?;
        let (eps, sigma) = material_at_frequency(m, f)?;
        Ok(match property {
            Property::Eps => eps,
            Property::Sigma => sigma,
        })
    };
    let room = &scene.room;
    let t = room.wall_thickness;
    let sx = (room.width + 2.0 * t) / width as f64;
    let sy = (room.depth + 2.0 * t) / height as f64;
    let wall = pick(&room.wall_material)?;
    let air = match property {
        Property::Eps => 1.0,
        Property::Sigma => 0.0,
    };
    // Each pixel holds the area-weighted mean over SUB x SUB stratified samples.
    let offs: Vec<f64> = (0..SUB).map(|k| (k as f64 + 0.5) / SUB as f64).collect();
    let weight = 1.0 / (SUB * SUB) as f64;
    let px = |i: usize, a: f64| -t + (i as f64 + a) * sx;
    let py = |j: usize, a: f64| -t + (j as f64 + a) * sy;
    let mut values = Vec::with_capacity(width * height);
    for j in 0..height {
        for i in 0..width {
            let mut inside = 0usize;
            for &b in &offs {
                let y = py(j, b);
                for &a in &offs {
                    let x = px(i, a);
                    if x > 0.0 && x < room.width && y > 0.0 && y < room.depth {
                        inside += 1;
                    }
                }
            }
            let c = inside as f64 * weight;
            values.push(c * air + (1.0 - c) * wall);
        }
    }
    for o in &scene.obstacles {
        let v = pick(&o.material)?;
        let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
        for p in &o.footprint {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = |a: f64, b: f64, s: f64, n: usize| {
            let i0 = ((a + t) / s).floor().max(0.0) as usize;
            let i1 = ((b + t) / s).floor();
            if i1 < 0.0 || i0 >= n {
                None
            } else {
                Some((i0, (i1 as usize).min(n - 1)))
            }
        };
        let (Some((i0, i1)), Some((j0, j1))) = (span(lo.x, hi.x, sx, width), span(lo.y, hi.y, sy, height)) else {
            continue;
        };
        for j in j0..=j1 {
            for i in i0..=i1 {
                let mut covered = 0usize;
                for &b in &offs {
                    for &a in &offs {
                        if convex_inset(&o.footprint, Vec2::new(px(i, a), py(j, b))) >= 0.0 {
                            covered += 1;
                        }
                    }
                }
                values[j * width + i] += covered as f64 * weight * (v - air);
            }
        }
    }
    Raster::new(
        width,
        height,
        values,
        [sx, sy],
        match property {
            Property::Eps => ChannelTag::Eps,
            Property::Sigma => ChannelTag::Sigma,
        },
    )
}

/// Free-space received power over receiver grid `grid_index`, dBm, with both
/// antenna patterns evaluated on the line of sight. Values below `floor_dbm`
/// (a receiver in the dipole null) are clamped to it.
pub fn fspl_map(scene: &Scene, grid_index: usize) -> Result<Raster> {
    fspl_map_with_floor(scene, grid_index, crate::propagation::PropagationConfig::default().power_floor_dbm)
}

pub fn fspl_map_with_floor(scene: &Scene, grid_index: usize, floor_dbm: f64) -> Result<Raster> {
    let grid = scene.grid(grid_index)?;
    let lambda = C0 / (scene.frequency_ghz * 1e9);
    let tx = scene.tx.position;
    let mut values = Vec::with_capacity(grid.len());
    for p in grid.points() {
        let d = p - tx;
        let dist = d.norm();
        if !(dist > 0.0) {
            return Err(Error::domain(format!(
                "receiver at ({:.3}, {:.3}, {:.3}) coincides with the transmitter",
                p.x, p.y, p.z
            )));
        }
        let dir = d / dist;
        let gains = gain_toward(scene.tx.pattern, dir) * gain_toward(grid.pattern, -dir);
        let v = scene.tx.power_dbm
            + 10.0 * gains.log10()
            + 20.0 * (lambda / (4.0 * std::f64::consts::PI * dist)).log10();
        values.push(if v.is_nan() { floor_dbm } else { v.max(floor_dbm) });
    }
    Raster::new(grid.nx, grid.ny, values, [grid.spacing_x, grid.spacing_y], ChannelTag::Fspl)
}
