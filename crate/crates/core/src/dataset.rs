//! Dataset samples, augmentation, grouped splitting and the manifest.
//!
//! Layout under the dataset root (all manifest paths are relative to it):
//! `scenes/`, `maps/`, `tensors/` and `manifest.json`.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encode::{EncodeBounds, Tensor};
use crate::error::{Error, Result};
use crate::formats::{self, atomic_write};
use crate::propagation::PropagationConfig;
use crate::radiomap::RadioMap;
use crate::scene::GenerationParams;

pub const MANIFEST_FORMAT: &str = "roomwave-manifest";
pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Augmentation {
    None,
    /// Rows reversed (upside down).
    Vflip,
    /// Columns reversed (left to right).
    Hflip,
    /// Both.
    Rot180,
}

impl Augmentation {
    pub const DEFAULT: [Augmentation; 3] = [Augmentation::None, Augmentation::Vflip, Augmentation::Hflip];

    /// `(vflip, hflip)`.
    pub fn flips(self) -> (bool, bool) {
        match self {
            Self::None => (false, false),
            Self::Vflip => (true, false),
            Self::Hflip => (false, true),
            Self::Rot180 => (true, true),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Vflip => "vflip",
            Self::Hflip => "hflip",
            Self::Rot180 => "rot180",
        }
    }

    pub fn apply_map(self, m: &RadioMap) -> RadioMap {
        let (v, h) = self.flips();
        m.flipped(v, h)
    }

    pub fn apply_tensor(self, t: &Tensor) -> Tensor {
        let (v, h) = self.flips();
        t.flipped(v, h)
    }
}

/// Applies each augmentation to a `(tensor, target)` pair.
pub fn augment(tensor: &Tensor, target: &RadioMap, augs: &[Augmentation]) -> Vec<(Augmentation, Tensor, RadioMap)> {
    augs.iter()
        .map(|&a| (a, a.apply_tensor(tensor), a.apply_map(target)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];
}

/// A file relative to the dataset root with the SHA-256 of its bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRef {
    pub path: String,
    pub sha256: String,
}

/// One (frequency, grid) pair of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEntry {
    pub frequency_ghz: f64,
    pub grid_index: usize,
    pub grid_height: f64,
    pub tensor: FileRef,
    pub target: FileRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub scene_index: usize,
    pub scene_seed: u64,
    /// Hash of the unaugmented scene; all augmentations of a scene share it.
    pub scene_hash: String,
    pub scene: FileRef,
    pub augmentation: Augmentation,
    pub split: Split,
    pub entries: Vec<SampleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    /// Requested `[train, val, test]` sample counts.
    pub sizes: [usize; 3],
    /// Keep all augmentations of a scene in one split.
    pub group_augmentations: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            sizes: [200, 50, 50],
            group_augmentations: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub requested: [usize; 3],
    pub realized: [usize; 3],
    pub group_augmentations: bool,
    pub shuffle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub scene_count: usize,
    pub frequencies_ghz: Vec<f64>,
    pub grid_heights: Vec<f64>,
    pub augmentations: Vec<Augmentation>,
    pub generation: GenerationParams,
    pub propagation: PropagationConfig,
    pub bounds: EncodeBounds,
    pub interpolation: String,
    pub split: SplitRecord,
    pub samples: Vec<Sample>,
}

/// Split of `n` items into `sizes` proportions over `groups` groups by largest remainder.
fn group_counts(groups: usize, sizes: [usize; 3]) -> [usize; 3] {
    let n: usize = sizes.iter().sum();
    let mut counts = [0usize; 3];
    let mut rem = [(0usize, 0usize); 3];
    for k in 0..3 {
        counts[k] = groups * sizes[k] / n;
        rem[k] = (groups * sizes[k] % n, k);
    }
    let left = groups - counts.iter().sum::<usize>();
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, k) in rem.iter().take(left) {
        counts[k] += 1;
    }
    counts
}

/// Assigns splits in place with a seeded shuffle.
///
/// `group_key` maps a sample to its base scene. In grouped mode whole groups are
/// shuffled and allotted by largest remainder, so realized sizes can differ
/// from the requested ones when they are not multiples of the group size.
pub fn assign_splits(samples: &mut [Sample], seed: u64, cfg: &SplitConfig) -> Result<SplitRecord> {
    let n = samples.len();
    if cfg.sizes.iter().sum::<usize>() != n {
        return Err(Error::contract(format!(
            "split sizes {:?} do not add up to {n} samples",
            cfg.sizes
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<Vec<usize>> = if cfg.group_augmentations {
        let mut keys: Vec<&str> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, s) in samples.iter().enumerate() {
            match keys.iter().position(|h| *h == s.scene_hash) {
                Some(g) => groups[g].push(k),
                None => {
                    keys.push(&s.scene_hash);
                    groups.push(vec![k]);
                }
            }
        }
        groups
    } else {
        (0..n).map(|k| vec![k]).collect()
    };
    order.shuffle(&mut rng);
    let counts = if cfg.group_augmentations {
        group_counts(order.len(), cfg.sizes)
    } else {
        cfg.sizes
    };
    let mut realized = [0usize; 3];
    let mut it = order.into_iter();
    for (k, split) in Split::ALL.iter().enumerate() {
        for group in it.by_ref().take(counts[k]) {
            for idx in group {
                samples[idx].split = *split;
                realized[k] += 1;
            }
        }
    }
    Ok(SplitRecord {
        requested: cfg.sizes,
        realized,
        group_augmentations: cfg.group_augmentations,
        shuffle: "chacha8".into(),
    })
}

fn check_file(root: &Path, id: &str, f: &FileRef) -> Result<PathBuf> {
    let path = root.join(&f.path);
    if !path.exists() {
        return Err(Error::NotFound { id: id.into(), path });
    }
    let side = formats::sidecar_path(&path);
    if f.path.ends_with(".bin") && !side.exists() {
        return Err(Error::NotFound {
            id: id.into(),
            path: side,
        });
    }
    formats::read_verified(&path, &f.sha256)?;
    Ok(path)
}

impl Manifest {
    pub fn write(&self, root: &Path) -> Result<()> {
        atomic_write(&root.join(MANIFEST_FILE), formats::to_json(self).as_bytes())
    }

    pub fn read(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST_FILE);
        let m: Manifest = formats::from_json(&formats::read_text(&path)?, &path)?;
        if m.format != MANIFEST_FORMAT || m.version != MANIFEST_VERSION {
            return Err(Error::Parse {
                path: path.display().to_string(),
                message: format!("unsupported manifest format {} v{}", m.format, m.version),
            });
        }
        Ok(m)
    }

    pub fn split_samples(&self, split: Split) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(move |s| s.split == split)
    }

    pub fn split_sizes(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for s in &self.samples {
            c[s.split as usize] += 1;
        }
        c
    }

    /// Checks that every referenced file exists and matches its checksum.
    pub fn verify(&self, root: &Path) -> Result<()> {
        for s in &self.samples {
            check_file(root, &s.id, &s.scene)?;
            for e in &s.entries {
                check_file(root, &s.id, &e.tensor)?;
                check_file(root, &s.id, &e.target)?;
            }
        }
        Ok(())
    }
}

/// Loads an entry's input tensor and target map, verifying checksums.
pub fn load_entry(root: &Path, sample: &Sample, entry: &SampleEntry) -> Result<(Tensor, RadioMap)> {
    let t = check_file(root, &sample.id, &entry.tensor)?;
    let m = check_file(root, &sample.id, &entry.target)?;
    Ok((Tensor::read(&t)?, RadioMap::read(&m)?))
}

/// Writes a tensor under `root/rel` and returns its reference.
pub fn store_tensor(root: &Path, rel: &str, t: &Tensor) -> Result<FileRef> {
    t.write(&root.join(rel))?;
    Ok(FileRef {
        path: rel.into(),
        sha256: formats::sha256_hex(&t.data_bytes()),
    })
}

pub fn store_map(root: &Path, rel: &str, m: &RadioMap) -> Result<FileRef> {
    m.write(&root.join(rel))?;
    Ok(FileRef {
        path: rel.into(),
        sha256: formats::sha256_hex(&m.data_bytes()),
    })
}
