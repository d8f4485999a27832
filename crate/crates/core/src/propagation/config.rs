use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How obstacle crossings are charged against the transmission budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmissionCounting {
    /// One event per obstacle passed through.
    Traversals,
    /// One event per interface crossed (two per obstacle).
    Crossings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffractionEdges {
    /// Vertical obstacle edges only.
    Vertical,
    /// Vertical edges plus the horizontal edges of obstacle tops.
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationConfig {
    pub max_reflections: usize,
    pub max_transmissions: usize,
    pub max_diffractions: usize,
    /// Paths whose spreading-only gain falls below this are dropped.
    pub min_path_gain_db: f64,
    pub include_walls: bool,
    /// Room-boundary reflections allowed on each side of a diffraction.
    pub diffraction_side_reflections: usize,
    pub diffraction_edges: DiffractionEdges,
    pub transmission_counting: TransmissionCounting,
    pub power_floor_dbm: f64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self::new(3, 3, 1)
    }
}

impl PropagationConfig {
    pub fn new(r: usize, t: usize, d: usize) -> Self {
        Self {
            max_reflections: r,
            max_transmissions: t,
            max_diffractions: d,
            min_path_gain_db: -250.0,
            include_walls: true,
            diffraction_side_reflections: 1,
            diffraction_edges: DiffractionEdges::Vertical,
            transmission_counting: TransmissionCounting::Traversals,
            power_floor_dbm: -250.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_diffractions > 1 {
            return Err(Error::Config(format!(
                "max_diffractions must be 0 or 1, got {}",
                self.max_diffractions
            )));
        }
        if !self.min_path_gain_db.is_finite() || !self.power_floor_dbm.is_finite() {
            return Err(Error::Config("gain threshold and power floor must be finite".into()));
        }
        Ok(())
    }

    /// `(R, T, D)` label such as `3R3T1D`.
    pub fn label(&self) -> String {
        format!(
            "{}R{}T{}D",
            self.max_reflections, self.max_transmissions, self.max_diffractions
        )
    }
}
