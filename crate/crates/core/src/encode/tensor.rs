//! Channel-major `f32` tensors and the model input assembly.
//!
//! A tensor is stored as `name.bin` (little-endian `f32`, channel-major then
//! row-major) plus the `name.json` [`TensorHeader`] sidecar. Targets and
//! predictions use the same format with a single unnormalized `power` channel.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{self, atomic_write, sidecar_path};
use crate::radiomap::RadioMap;
use crate::scene::{scene_hash, ReceiverGrid, Scene};

use super::raster::{fspl_map, rasterize_property, ChannelTag, Property, Raster};
use super::resample::{resize_bicubic, upsample_nearest};
use super::{PREDICTION_SIDE, TENSOR_SIDE};

pub const TENSOR_FORMAT: &str = "roomwave-tensor";
pub const TENSOR_VERSION: u32 = 1;
pub const INTERPOLATION: &str = "bicubic catmull-rom a=-0.5, edge clamp, pixel centres";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    /// `(v - lo) / (hi - lo)` clamped to `[0, 1]`.
    #[inline]
    pub fn normalize(&self, v: f64) -> f64 {
        ((v - self.lo) / self.span()).clamp(0.0, 1.0)
    }

    #[inline]
    pub fn denormalize(&self, u: f64) -> f64 {
        self.lo + u * self.span()
    }
}

/// Fixed per-channel normalization bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncodeBounds {
    pub eps: Bounds,
    /// S/m.
    pub sigma: Bounds,
    /// dBm.
    pub fspl: Bounds,
    /// dBm, for the stage-2 prediction channel.
    pub power: Bounds,
}

impl Default for EncodeBounds {
    fn default() -> Self {
        Self {
            eps: Bounds::new(1.0, 6.0),
            sigma: Bounds::new(0.0, 0.5),
            fspl: Bounds::new(-120.0, 0.0),
            power: Bounds::new(-120.0, 0.0),
        }
    }
}

impl EncodeBounds {
    pub fn validate(&self) -> Result<()> {
        for (name, b) in [("eps", self.eps), ("sigma", self.sigma), ("fspl", self.fspl), ("power", self.power)] {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.hi > b.lo) {
                return Err(Error::Config(format!("{name} bounds [{}, {}] are not increasing", b.lo, b.hi)));
            }
        }
        Ok(())
    }

    pub fn for_tag(&self, tag: ChannelTag) -> Bounds {
        match tag {
            ChannelTag::Eps => self.eps,
            ChannelTag::Sigma => self.sigma,
            ChannelTag::Fspl => self.fspl,
            ChannelTag::Power => self.power,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f32>,
    pub tags: Vec<ChannelTag>,
    /// Normalization used per channel; `None` for physical units.
    pub bounds: Vec<Option<Bounds>>,
    pub scene_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorHeader {
    pub format: String,
    pub version: u32,
    /// `[C, H, W]`.
    pub dims: [usize; 3],
    pub dtype: String,
    pub channels: Vec<ChannelTag>,
    pub bounds: Vec<Option<Bounds>>,
    pub scene_hash: Option<String>,
    pub interpolation: String,
    pub data_sha256: String,
}

impl Tensor {
    pub fn new(
        (channels, height, width): (usize, usize, usize),
        data: Vec<f32>,
        tags: Vec<ChannelTag>,
        bounds: Vec<Option<Bounds>>,
        scene_hash: Option<String>,
    ) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 || data.len() != channels * height * width {
            return Err(Error::contract(format!(
                "tensor {channels}x{height}x{width} with {} values",
                data.len()
            )));
        }
        if tags.len() != channels || bounds.len() != channels {
            return Err(Error::contract("one tag and one bounds entry per channel"));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
            tags,
            bounds,
            scene_hash,
        })
    }

    /// Stacks rasters of equal dims, normalizing those with bounds.
    pub fn from_rasters(rasters: &[(&Raster, Option<Bounds>)], scene_hash: Option<String>) -> Result<Self> {
        let first = rasters.first().ok_or_else(|| Error::contract("no channels"))?.0;
        let (w, h) = (first.width, first.height);
        let mut data = Vec::with_capacity(rasters.len() * w * h);
        for (r, b) in rasters {
            if (r.width, r.height) != (w, h) {
                return Err(Error::contract(format!(
                    "channel dims {}x{} differ from {w}x{h}",
                    r.width, r.height
                )));
            }
            match b {
                Some(b) => data.extend(r.values.iter().map(|&v| b.normalize(v) as f32)),
                None => data.extend(r.values.iter().map(|&v| v as f32)),
            }
        }
        Self::new(
            (rasters.len(), h, w),
            data,
            rasters.iter().map(|(r, _)| r.tag).collect(),
            rasters.iter().map(|(_, b)| *b).collect(),
            scene_hash,
        )
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    /// Channel `c` in physical units.
    pub fn raster(&self, c: usize) -> Raster {
        let b = self.bounds[c];
        let values = self
            .channel(c)
            .iter()
            .map(|&u| match b {
                Some(b) => b.denormalize(u as f64),
                None => u as f64,
            })
            .collect();
        Raster {
            width: self.width,
            height: self.height,
            values,
            meters_per_pixel: [1.0, 1.0],
            tag: self.tags[c],
        }
    }

    pub fn data_bytes(&self) -> Vec<u8> {
        formats::f32_le_bytes(self.data.iter().copied())
    }

    pub fn header(&self) -> TensorHeader {
        TensorHeader {
            format: TENSOR_FORMAT.into(),
            version: TENSOR_VERSION,
            dims: [self.channels, self.height, self.width],
            dtype: "f32le".into(),
            channels: self.tags.clone(),
            bounds: self.bounds.clone(),
            scene_hash: self.scene_hash.clone(),
            interpolation: INTERPOLATION.into(),
            data_sha256: formats::sha256_hex(&self.data_bytes()),
        }
    }

    pub fn write(&self, bin: &Path) -> Result<()> {
        atomic_write(bin, &self.data_bytes())?;
        atomic_write(&sidecar_path(bin), formats::to_json(&self.header()).as_bytes())
    }

    pub fn read(bin: &Path) -> Result<Self> {
        let side = sidecar_path(bin);
        let h: TensorHeader = formats::from_json(&formats::read_text(&side)?, &side)?;
        if h.format != TENSOR_FORMAT || h.version != TENSOR_VERSION || h.dtype != "f32le" {
            return Err(Error::Parse {
                path: side.display().to_string(),
                message: format!("unsupported tensor format {} v{} ({})", h.format, h.version, h.dtype),
            });
        }
        let bytes = formats::read_verified(bin, &h.data_sha256)?;
        let data = formats::f32_from_le(&bytes, bin)?;
        let [c, hh, w] = h.dims;
        Self::new((c, hh, w), data, h.channels, h.bounds, h.scene_hash).map_err(|e| Error::Parse {
            path: bin.display().to_string(),
            message: e.to_string(),
        })
    }

    /// Every channel with rows reversed (`vflip`) and/or columns reversed (`hflip`).
    pub fn flipped(&self, vflip: bool, hflip: bool) -> Self {
        let (w, h) = (self.width, self.height);
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.channels {
            let ch = self.channel(c);
            for j in 0..h {
                let sj = if vflip { h - 1 - j } else { j };
                for i in 0..w {
                    let si = if hflip { w - 1 - i } else { i };
                    data.push(ch[sj * w + si]);
                }
            }
        }
        Self {
            data,
            ..self.clone()
        }
    }
}

/// ε and σ rasters at full resolution, resized to the tensor side.
fn material_channels(scene: &Scene) -> Result<(Raster, Raster)> {
    let eps = resize_bicubic(&rasterize_property(scene, Property::Eps)?, TENSOR_SIDE, TENSOR_SIDE)?;
    let sigma = resize_bicubic(&rasterize_property(scene, Property::Sigma)?, TENSOR_SIDE, TENSOR_SIDE)?;
    Ok((eps, sigma))
}

/// First-stage input: normalized `[eps, sigma, fspl]` at 256 x 256 for grid `grid_index`.
pub fn assemble_stage1(scene: &Scene, grid_index: usize, bounds: &EncodeBounds) -> Result<Tensor> {
    let (eps, sigma) = material_channels(scene)?;
    let fspl = resize_bicubic(&fspl_map(scene, grid_index)?, TENSOR_SIDE, TENSOR_SIDE)?;
    Tensor::from_rasters(
        &[(&eps, Some(bounds.eps)), (&sigma, Some(bounds.sigma)), (&fspl, Some(bounds.fspl))],
        Some(scene_hash(scene)),
    )
}

/// Second-stage input: `[eps, sigma, prediction]` with the 128 x 128 first-stage
/// prediction (dBm) upsampled by nearest neighbour.
pub fn assemble_stage2(scene: &Scene, prediction: &Raster, bounds: &EncodeBounds) -> Result<Tensor> {
    if (prediction.width, prediction.height) != (PREDICTION_SIDE, PREDICTION_SIDE) {
        return Err(Error::contract(format!(
            "stage-1 prediction must be {PREDICTION_SIDE}x{PREDICTION_SIDE}, got {}x{}",
            prediction.width, prediction.height
        )));
    }
    let (eps, sigma) = material_channels(scene)?;
    let mut up = upsample_nearest(prediction, TENSOR_SIDE / PREDICTION_SIDE)?;
    up.tag = ChannelTag::Power;
    Tensor::from_rasters(
        &[(&eps, Some(bounds.eps)), (&sigma, Some(bounds.sigma)), (&up, Some(bounds.power))],
        Some(scene_hash(scene)),
    )
}

/// Radio map resized to the 128 x 128 model output, dBm.
pub fn target_resize(map: &RadioMap) -> Result<Raster> {
    let r = Raster::new(
        map.nx(),
        map.ny(),
        map.power_dbm.clone(),
        [map.grid.spacing_x, map.grid.spacing_y],
        ChannelTag::Power,
    )?;
    resize_bicubic(&r, PREDICTION_SIDE, PREDICTION_SIDE)
}

/// A 128 x 128 prediction resized back onto `grid`, dBm.
pub fn prediction_to_grid(prediction: &Raster, grid: &ReceiverGrid) -> Result<Raster> {
    if (prediction.width, prediction.height) != (PREDICTION_SIDE, PREDICTION_SIDE) {
        return Err(Error::contract(format!(
            "prediction must be {PREDICTION_SIDE}x{PREDICTION_SIDE}, got {}x{}",
            prediction.width, prediction.height
        )));
    }
    resize_bicubic(prediction, grid.nx, grid.ny)
}
