//! Received-power maps over a receiver grid and their file format.
//!
//! A map is stored as two files:
//! - `name.bin`: `ny * nx` little-endian `f32` values, row-major. Row `j`
//!   holds receivers at `y = origin.y + j * spacing_y`, column `i` those at
//!   `x = origin.x + i * spacing_x`.
//! - `name.json`: the [`MapHeader`] sidecar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{self, atomic_write, sidecar_path};
use crate::propagation::PropagationConfig;
use crate::scene::ReceiverGrid;

pub const MAP_FORMAT: &str = "roomwave-radiomap";
pub const MAP_VERSION: u32 = 1;

/// What produced a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSource {
    Traced { config: PropagationConfig },
    Baseline { model: String },
    Prediction { model: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadioMap {
    pub grid: ReceiverGrid,
    /// dBm, flat index `j * nx + i`.
    pub power_dbm: Vec<f64>,
    pub frequency_ghz: f64,
    pub source: MapSource,
    pub scene_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapHeader {
    pub format: String,
    pub version: u32,
    /// `[rows, cols]` = `[ny, nx]`.
    pub dims: [usize; 2],
    pub dtype: String,
    pub grid: ReceiverGrid,
    pub frequency_ghz: f64,
    pub source: MapSource,
    pub scene_hash: String,
    pub data_sha256: String,
}

impl RadioMap {
    pub fn new(grid: ReceiverGrid, power_dbm: Vec<f64>, frequency_ghz: f64, source: MapSource, scene_hash: String) -> Result<Self> {
        if power_dbm.len() != grid.len() {
            return Err(Error::contract(format!(
                "map has {} values for a {}x{} grid",
                power_dbm.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(Self {
            grid,
            power_dbm,
            frequency_ghz,
            source,
            scene_hash,
        })
    }

    pub fn nx(&self) -> usize {
        self.grid.nx
    }

    pub fn ny(&self) -> usize {
        self.grid.ny
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.power_dbm[j * self.grid.nx + i]
    }

    pub fn median(&self) -> f64 {
        crate::metrics::quantile(&self.power_dbm, 0.5)
    }

    pub fn data_bytes(&self) -> Vec<u8> {
        formats::f32_le_bytes(self.power_dbm.iter().map(|&v| v as f32))
    }

    pub fn header(&self) -> MapHeader {
        MapHeader {
            format: MAP_FORMAT.into(),
            version: MAP_VERSION,
            dims: [self.grid.ny, self.grid.nx],
            dtype: "f32le".into(),
            grid: self.grid.clone(),
            frequency_ghz: self.frequency_ghz,
            source: self.source.clone(),
            scene_hash: self.scene_hash.clone(),
            data_sha256: formats::sha256_hex(&self.data_bytes()),
        }
    }

    /// Writes `bin` and its `.json` sidecar.
    pub fn write(&self, bin: &Path) -> Result<()> {
        let data = self.data_bytes();
        atomic_write(bin, &data)?;
        atomic_write(&sidecar_path(bin), formats::to_json(&self.header()).as_bytes())
    }

    /// Reads a map, verifying its dims and checksum.
    pub fn read(bin: &Path) -> Result<Self> {
        let side = sidecar_path(bin);
        let header: MapHeader = formats::from_json(&formats::read_text(&side)?, &side)?;
        if header.format != MAP_FORMAT || header.version != MAP_VERSION {
            return Err(Error::Parse {
                path: side.display().to_string(),
                message: format!("unsupported map format {} v{}", header.format, header.version),
            });
        }
        let bytes = formats::read_verified(bin, &header.data_sha256)?;
        let values = formats::f32_from_le(&bytes, bin)?;
        if header.dims != [header.grid.ny, header.grid.nx] || values.len() != header.grid.len() {
            return Err(Error::Parse {
                path: bin.display().to_string(),
                message: format!("{} values do not match dims {:?}", values.len(), header.dims),
            });
        }
        Ok(Self {
            grid: header.grid,
            power_dbm: values.into_iter().map(f64::from).collect(),
            frequency_ghz: header.frequency_ghz,
            source: header.source,
            scene_hash: header.scene_hash,
        })
    }

    /// Map with rows reversed (`vflip`) and/or columns reversed (`hflip`).
    pub fn flipped(&self, vflip: bool, hflip: bool) -> Self {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = Vec::with_capacity(self.power_dbm.len());
        for j in 0..ny {
            let sj = if vflip { ny - 1 - j } else { j };
            for i in 0..nx {
                let si = if hflip { nx - 1 - i } else { i };
                out.push(self.power_dbm[sj * nx + si]);
            }
        }
        Self {
            power_dbm: out,
            ..self.clone()
        }
    }
}
