//! Empirical large-scale path-loss models evaluated over receiver grids.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats;
use crate::propagation::antenna::gain_toward;
use crate::propagation::field::fspl_db;
use crate::radiomap::{MapSource, RadioMap};
use crate::scene::{scene_hash, Scene};

/// Bundled model table.
pub const BUNDLED_MODELS: &str = include_str!("../data/baselines.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PathLossForm {
    /// Close-in free-space reference: `n`.
    Ci,
    /// Close-in with frequency-weighted exponent: `n`, `b`, `f0`.
    Cif,
    /// Floating intercept: `alpha`, `beta`, `gamma`.
    Abg,
    /// Two ABG slopes joined at `breakpoint`: `alpha`, `beta`, `gamma`, `breakpoint`, `alpha2`.
    AbgDual,
    /// `max(los_a + los_b lg d + los_c lg f, nlos_a + nlos_b lg d + nlos_c lg f)`.
    #[serde(rename = "TR38901_INH_NLOS")]
    Tr38901InhNlos,
}

impl PathLossForm {
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Self::Ci => &["n"],
            Self::Cif => &["n", "b", "f0"],
            Self::Abg => &["alpha", "beta", "gamma"],
            Self::AbgDual => &["alpha", "beta", "gamma", "breakpoint", "alpha2"],
            Self::Tr38901InhNlos => &["los_a", "los_b", "los_c", "nlos_a", "nlos_b", "nlos_c"],
        }
    }
}

fn default_d0() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLossModelSpec {
    pub name: String,
    pub form: PathLossForm,
    pub coefficients: BTreeMap<String, f64>,
    #[serde(default = "default_d0")]
    pub reference_distance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ModelFile {
    model: Vec<PathLossModelSpec>,
}

impl PathLossModelSpec {
    pub fn new(name: &str, form: PathLossForm, coefficients: &[(&str, f64)]) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            form,
            coefficients: coefficients.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            reference_distance: 1.0,
            source: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reference_distance > 0.0 && self.reference_distance.is_finite()) {
            return Err(Error::Config(format!(
                "model '{}': reference distance must be positive",
                self.name
            )));
        }
        for key in self.form.required() {
            match self.coefficients.get(*key) {
                Some(v) if v.is_finite() => {}
                Some(_) => return Err(Error::Config(format!("model '{}': {key} is not finite", self.name))),
                None => return Err(Error::Config(format!("model '{}': missing coefficient {key}", self.name))),
            }
        }
        if self.form == PathLossForm::AbgDual && self.c("breakpoint") < self.reference_distance {
            return Err(Error::Config(format!(
                "model '{}': breakpoint lies below the reference distance",
                self.name
            )));
        }
        Ok(())
    }

    fn c(&self, key: &str) -> f64 {
        self.coefficients[key]
    }

    /// Optional log-normal shadowing standard deviation, dB.
    pub fn shadow_sigma(&self) -> Option<f64> {
        self.coefficients.get("shadow_sigma").copied()
    }
}

/// Parses a model table (`[[model]]` entries).
pub fn parse_models(text: &str, origin: &str) -> Result<Vec<PathLossModelSpec>> {
    let file: ModelFile = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.into(),
        message: e.to_string(),
    })?;
    let mut seen = std::collections::BTreeSet::new();
    for m in &file.model {
        m.validate()?;
        if !seen.insert(m.name.clone()) {
            return Err(Error::Config(format!("duplicate model name '{}'", m.name)));
        }
    }
    Ok(file.model)
}

pub fn load_models(path: &Path) -> Result<Vec<PathLossModelSpec>> {
    parse_models(&formats::read_text(path)?, &path.display().to_string())
}

pub fn bundled_models() -> Vec<PathLossModelSpec> {
    parse_models(BUNDLED_MODELS, "bundled baselines").expect("bundled model table is valid")
}

pub fn find_model<'a>(models: &'a [PathLossModelSpec], name: &str) -> Result<&'a PathLossModelSpec> {
    models.iter().find(|m| m.name == name).ok_or_else(|| {
        let names: Vec<_> = models.iter().map(|m| m.name.as_str()).collect();
        Error::Config(format!("unknown model '{name}' (available: {})", names.join(", ")))
    })
}

/// Path loss in dB at distance `d` (m) and frequency `f_ghz`.
pub fn path_loss(spec: &PathLossModelSpec, d: f64, f_ghz: f64) -> Result<f64> {
    let d0 = spec.reference_distance;
    if !(d >= d0) {
        return Err(Error::domain(format!(
            "model '{}': distance {d} m is below the reference distance {d0} m",
            spec.name
        )));
    }
    if !(f_ghz > 0.0 && f_ghz.is_finite()) {
        return Err(Error::domain(format!("frequency must be positive, got {f_ghz} GHz")));
    }
    let lg = f64::log10;
    let c = |k| spec.c(k);
    Ok(match spec.form {
        PathLossForm::Ci => fspl_db(d0, f_ghz) + 10.0 * c("n") * lg(d / d0),
        PathLossForm::Cif => {
            let f0 = c("f0");
            fspl_db(d0, f_ghz) + 10.0 * c("n") * (1.0 + c("b") * (f_ghz - f0) / f0) * lg(d / d0)
        }
        PathLossForm::Abg => 10.0 * c("alpha") * lg(d) + c("beta") + 10.0 * c("gamma") * lg(f_ghz),
        PathLossForm::AbgDual => {
            let bp = c("breakpoint");
            let base = c("beta") + 10.0 * c("gamma") * lg(f_ghz);
            if d <= bp {
                base + 10.0 * c("alpha") * lg(d)
            } else {
                base + 10.0 * c("alpha") * lg(bp) + 10.0 * c("alpha2") * lg(d / bp)
            }
        }
        PathLossForm::Tr38901InhNlos => {
            let los = c("los_a") + c("los_b") * lg(d) + c("los_c") * lg(f_ghz);
            let nlos = c("nlos_a") + c("nlos_b") * lg(d) + c("nlos_c") * lg(f_ghz);
            los.max(nlos)
        }
    })
}

/// Antenna gains applied on top of the path loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaselineGains {
    /// Scene transmitter and grid patterns along the line of sight.
    Patterns,
    /// Constant gains, dBi.
    Fixed { gt_dbi: f64, gr_dbi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOptions {
    pub gains: BaselineGains,
    /// Seeded log-normal shadowing with the model's `shadow_sigma`.
    pub shadow_seed: Option<u64>,
    pub floor_dbm: f64,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        Self {
            gains: BaselineGains::Patterns,
            shadow_seed: None,
            floor_dbm: -250.0,
        }
    }
}

/// Received power `P_t + G_t + G_r - PL(d)` over grid `grid_index`.
///
/// Receivers closer than the reference distance are evaluated at it.
pub fn baseline_radio_map(scene: &Scene, grid_index: usize, spec: &PathLossModelSpec, opts: &BaselineOptions) -> Result<RadioMap> {
    spec.validate()?;
    let grid = scene.grid(grid_index)?;
    let tx = scene.tx.position;
    let mut noise = match (opts.shadow_seed, spec.shadow_sigma()) {
        (Some(seed), Some(sigma)) => Some((
            ChaCha8Rng::seed_from_u64(seed),
            Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?,
        )),
        _ => None,
    };
    let mut values = Vec::with_capacity(grid.len());
    for p in grid.points() {
        let v = p - tx;
        let d = v.norm();
        if !(d > 0.0) {
            return Err(Error::domain("receiver coincides with the transmitter"));
        }
        let gains_db = match opts.gains {
            BaselineGains::Fixed { gt_dbi, gr_dbi } => gt_dbi + gr_dbi,
            BaselineGains::Patterns => {
                let dir = v / d;
                10.0 * (gain_toward(scene.tx.pattern, dir) * gain_toward(grid.pattern, -dir)).log10()
            }
        };
        let mut pr = scene.tx.power_dbm + gains_db - path_loss(spec, d.max(spec.reference_distance), scene.frequency_ghz)?;
        if let Some((rng, normal)) = noise.as_mut() {
            pr -= normal.sample(rng);
        }
        values.push(if pr.is_nan() { opts.floor_dbm } else { pr.max(opts.floor_dbm) });
    }
    RadioMap::new(
        grid.clone(),
        values,
        scene.frequency_ghz,
        MapSource::Baseline {
            model: spec.name.clone(),
        },
        scene_hash(scene),
    )
}

