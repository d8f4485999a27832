//! End-to-end dataset builds: generate, simulate, encode and store.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    assign_splits, augment, store_map, store_tensor, Augmentation, FileRef, Manifest, Sample, SampleEntry, Split,
    SplitConfig, MANIFEST_FORMAT, MANIFEST_VERSION,
};
use crate::encode::tensor::INTERPOLATION;
use crate::encode::{assemble_stage1, EncodeBounds};
use crate::error::{Error, Result};
use crate::formats;
use crate::propagation::{simulate_radio_map, PropagationConfig};
use crate::scene::io::scene_to_string;
use crate::scene::{generate_scene, scene_hash, GenerationParams, Scene};

/// Full build configuration. Every field has a default (the desk profile), so a
/// config file only needs the fields it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Number of base scenes; scene `i` uses seed `seed + i`.
    pub count: usize,
    /// Scene seed base and split shuffle seed.
    pub seed: u64,
    pub frequencies_ghz: Vec<f64>,
    pub grid_heights: Vec<f64>,
    pub augmentations: Vec<Augmentation>,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub generation: GenerationParams,
    pub propagation: PropagationConfig,
    pub bounds: EncodeBounds,
    pub split: SplitConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl PipelineConfig {
    /// 100 scenes at 28 GHz, both grids, 300 samples split 200/50/50.
    pub fn desk() -> Self {
        Self {
            count: 100,
            seed: 1,
            frequencies_ghz: vec![28.0],
            grid_heights: crate::scene::types::GRID_HEIGHTS.to_vec(),
            augmentations: Augmentation::DEFAULT.to_vec(),
            workers: 1,
            out: None,
            generation: GenerationParams::default(),
            propagation: PropagationConfig::default(),
            bounds: EncodeBounds::default(),
            split: SplitConfig::default(),
        }
    }

    /// 1000 scenes at 5 and 28 GHz, 3000 samples split 2000/500/500.
    pub fn full() -> Self {
        Self {
            count: 1000,
            frequencies_ghz: vec![5.0, 28.0],
            split: SplitConfig {
                sizes: [2000, 500, 500],
                group_augmentations: true,
            },
            ..Self::desk()
        }
    }

    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk()),
            "full" => Ok(Self::full()),
            _ => Err(Error::Config(format!("unknown profile '{name}' (desk, full)"))),
        }
    }

    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&formats::read_text(path)?, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.frequencies_ghz.is_empty() || self.grid_heights.is_empty() || self.augmentations.is_empty() {
            return bad("frequencies, grid heights and augmentations must be non-empty".into());
        }
        for &f in &self.frequencies_ghz {
            if !(f > 0.0 && f.is_finite()) {
                return bad(format!("frequency {f} GHz is not positive"));
            }
        }
        let mut augs = self.augmentations.clone();
        augs.sort();
        augs.dedup();
        if augs.len() != self.augmentations.len() {
            return bad("augmentations contain duplicates".into());
        }
        let probe = Scene::empty(self.frequencies_ghz[0]);
        for &h in &self.grid_heights {
            grid_index_for_height(&probe, h)?;
        }
        self.generation.validate()?;
        self.propagation.validate()?;
        self.bounds.validate()?;
        let samples = self.count * self.augmentations.len();
        let total: usize = self.split.sizes.iter().sum();
        if total != samples {
            return bad(format!(
                "split sizes {:?} add up to {total}, but {} scenes x {} augmentations give {samples} samples",
                self.split.sizes,
                self.count,
                self.augmentations.len()
            ));
        }
        Ok(())
    }

    pub fn scene_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }
}

/// Index of the receiver grid at height `h` (to 1 mm).
pub fn grid_index_for_height(scene: &Scene, h: f64) -> Result<usize> {
    scene
        .rx_grids
        .iter()
        .position(|g| (g.height - h).abs() < 1e-3)
        .ok_or_else(|| {
            let hs: Vec<String> = scene.rx_grids.iter().map(|g| g.height.to_string()).collect();
            Error::Config(format!("no receiver grid at {h} m (available: {})", hs.join(", ")))
        })
}

pub fn generate_scenes(cfg: &PipelineConfig) -> Result<Vec<Scene>> {
    let params = GenerationParams {
        frequency_ghz: cfg.frequencies_ghz[0],
        ..cfg.generation.clone()
    };
    (0..cfg.count).map(|i| generate_scene(cfg.scene_seed(i), &params)).collect()
}

fn freq_tag(f: f64) -> String {
    format!("{f}").replace('.', "p")
}

fn build_scene(cfg: &PipelineConfig, root: &Path, index: usize) -> Result<Vec<Sample>> {
    let params = GenerationParams {
        frequency_ghz: cfg.frequencies_ghz[0],
        ..cfg.generation.clone()
    };
    let seed = cfg.scene_seed(index);
    let scene = generate_scene(seed, &params)?;
    let name = format!("s{index:04}");
    let scene_rel = format!("scenes/{name}.json");
    let text = scene_to_string(&scene);
    formats::atomic_write(&root.join(&scene_rel), text.as_bytes())?;
    let scene_ref = FileRef {
        path: scene_rel,
        sha256: formats::sha256_hex(text.as_bytes()),
    };
    let hash = scene_hash(&scene);
    let mut entries: Vec<Vec<SampleEntry>> = vec![Vec::new(); cfg.augmentations.len()];
    for &f in &cfg.frequencies_ghz {
        let sf = scene.with_frequency(f);
        for &h in &cfg.grid_heights {
            let g = grid_index_for_height(&sf, h)?;
            let map = simulate_radio_map(&sf, g, &cfg.propagation)?;
            let tensor = assemble_stage1(&sf, g, &cfg.bounds)?;
            for (k, (aug, t, m)) in augment(&tensor, &map, &cfg.augmentations).into_iter().enumerate() {
                let stem = format!("{name}-{}-f{}-g{g}", aug.tag(), freq_tag(f));
                entries[k].push(SampleEntry {
                    frequency_ghz: f,
                    grid_index: g,
                    grid_height: sf.rx_grids[g].height,
                    tensor: store_tensor(root, &format!("tensors/{stem}.bin"), &t)?,
                    target: store_map(root, &format!("maps/{stem}.bin"), &m)?,
                });
            }
        }
    }
    Ok(cfg
        .augmentations
        .iter()
        .zip(entries)
        .map(|(&aug, entries)| Sample {
            id: format!("{name}-{}", aug.tag()),
            scene_index: index,
            scene_seed: seed,
            scene_hash: hash.clone(),
            scene: scene_ref.clone(),
            augmentation: aug,
            split: Split::Train,
            entries,
        })
        .collect())
}

/// Builds the dataset under `root` and writes its manifest.
///
/// Scenes are processed on a pool of `cfg.workers` threads; `progress` is
/// called with `(done, total)` as scenes finish. The output bytes do not
/// depend on the worker count.
pub fn build_dataset(cfg: &PipelineConfig, root: &Path, progress: &(dyn Fn(usize, usize) + Sync)) -> Result<Manifest> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let done = std::sync::atomic::AtomicUsize::new(0);
    let per_scene: Vec<Vec<Sample>> = pool.install(|| {
        (0..cfg.count)
            .into_par_iter()
            .map(|i| {
                let r = build_scene(cfg, root, i);
                progress(done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1, cfg.count);
                r
            })
            .collect::<Result<_>>()
    })?;
    let mut samples: Vec<Sample> = per_scene.into_iter().flatten().collect();
    let split = assign_splits(&mut samples, cfg.seed, &cfg.split)?;
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        version: MANIFEST_VERSION,
        seed: cfg.seed,
        scene_count: cfg.count,
        frequencies_ghz: cfg.frequencies_ghz.clone(),
        grid_heights: cfg.grid_heights.clone(),
        augmentations: cfg.augmentations.clone(),
        generation: cfg.generation.clone(),
        propagation: cfg.propagation.clone(),
        bounds: cfg.bounds,
        interpolation: INTERPOLATION.into(),
        split,
        samples,
    };
    manifest.write(root)?;
    Ok(manifest)
}
