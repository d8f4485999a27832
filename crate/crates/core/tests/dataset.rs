use std::collections::BTreeMap;
use std::path::Path;

use roomwave::dataset::{
    assign_splits, augment, load_entry, store_map, store_tensor, Augmentation, FileRef, Manifest, Sample, Split,
    SplitConfig,
};
use roomwave::encode::{assemble_stage1, fspl_map, EncodeBounds};
use roomwave::pipeline::{build_dataset, PipelineConfig};
use roomwave::propagation::{simulate_radio_map, PropagationConfig};
use roomwave::scene::{generate_scene, GenerationParams, Scene};
use roomwave::Error;

fn synthetic(scenes: usize, augs: &[Augmentation]) -> Vec<Sample> {
    let f = FileRef {
        path: String::new(),
        sha256: String::new(),
    };
    (0..scenes)
        .flat_map(|i| {
            let f = f.clone();
            augs.iter().map(move |&a| Sample {
                id: format!("s{i:04}-{}", a.tag()),
                scene_index: i,
                scene_seed: i as u64,
                scene_hash: format!("h{i}"),
                scene: f.clone(),
                augmentation: a,
                split: Split::Train,
                entries: Vec::new(),
            })
        })
        .collect()
}

#[test]
fn augmented_variants_never_straddle_splits() {
    for seed in 0..100 {
        let mut samples = synthetic(100, &Augmentation::DEFAULT);
        let rec = assign_splits(&mut samples, seed, &SplitConfig::default()).unwrap();
        assert_eq!(rec.realized, [201, 51, 48]);
        let mut by_scene: BTreeMap<&str, Vec<Split>> = BTreeMap::new();
        for s in &samples {
            by_scene.entry(&s.scene_hash).or_default().push(s.split);
        }
        assert!(by_scene.values().all(|v| v.iter().all(|&x| x == v[0])), "seed {seed}");
    }
}

#[test]
fn ungrouped_splits_have_exact_sizes() {
    let mut samples = synthetic(100, &Augmentation::DEFAULT);
    let cfg = SplitConfig {
        sizes: [200, 50, 50],
        group_augmentations: false,
    };
    assert_eq!(assign_splits(&mut samples, 4, &cfg).unwrap().realized, [200, 50, 50]);
    let mut bad = synthetic(10, &Augmentation::DEFAULT);
    assert!(matches!(assign_splits(&mut bad, 0, &SplitConfig::default()), Err(Error::Contract(_))));
}

#[test]
fn splits_are_seed_deterministic() {
    let run = |seed| {
        let mut s = synthetic(100, &Augmentation::DEFAULT);
        assign_splits(&mut s, seed, &SplitConfig::default()).unwrap();
        s.into_iter().map(|x| x.split).collect::<Vec<_>>()
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7), run(8));
}

fn small_config(workers: usize) -> PipelineConfig {
    PipelineConfig {
        count: 3,
        seed: 40,
        workers,
        propagation: PropagationConfig::new(1, 1, 0),
        split: SplitConfig {
            sizes: [6, 3, 0],
            group_augmentations: true,
        },
        ..PipelineConfig::desk()
    }
}

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for dir in ["", "scenes", "tensors", "maps"] {
        for e in std::fs::read_dir(root.join(dir)).unwrap() {
            let p = e.unwrap().path();
            if p.is_file() {
                out.insert(p.strip_prefix(root).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn dataset_build_is_deterministic_and_verifiable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let m = build_dataset(&small_config(1), a.path(), &|_, _| {}).unwrap();
    build_dataset(&small_config(2), b.path(), &|_, _| {}).unwrap();
    assert_eq!(tree(a.path()), tree(b.path()));

    assert_eq!(m.samples.len(), 9);
    assert_eq!(m.split_sizes(), [6, 3, 0]);
    let read = Manifest::read(a.path()).unwrap();
    assert_eq!(read, m);
    read.verify(a.path()).unwrap();
    for s in &read.samples {
        assert_eq!(s.entries.len(), 2);
        for e in &s.entries {
            let (t, map) = load_entry(a.path(), s, e).unwrap();
            assert_eq!((t.channels, t.height, t.width), (3, 256, 256));
            assert_eq!((map.nx(), map.ny()), (115, 65));
        }
    }

    let s = &read.samples[4];
    let victim = a.path().join(&s.entries[1].tensor.path);
    let mut bytes = std::fs::read(&victim).unwrap();
    bytes[77] ^= 1;
    std::fs::write(&victim, bytes).unwrap();
    assert!(matches!(read.verify(a.path()), Err(Error::Integrity { .. })));

    let gone = a.path().join(&read.samples[0].entries[0].target.path);
    std::fs::remove_file(gone).unwrap();
    match read.verify(a.path()) {
        Err(Error::NotFound { id, .. }) => assert_eq!(id, read.samples[0].id),
        other => panic!("{other:?}"),
    }
}

#[test]
fn store_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scene = generate_scene(5, &GenerationParams::default()).unwrap();
    let t = assemble_stage1(&scene, 0, &EncodeBounds::default()).unwrap();
    let m = simulate_radio_map(&scene, 0, &PropagationConfig::new(1, 0, 0)).unwrap();
    let sample = Sample {
        id: "x".into(),
        scene_index: 0,
        scene_seed: 5,
        scene_hash: String::new(),
        scene: FileRef {
            path: String::new(),
            sha256: String::new(),
        },
        augmentation: Augmentation::None,
        split: Split::Test,
        entries: vec![roomwave::dataset::SampleEntry {
            frequency_ghz: 28.0,
            grid_index: 0,
            grid_height: 0.765,
            tensor: store_tensor(dir.path(), "t/x.bin", &t).unwrap(),
            target: store_map(dir.path(), "m/x.bin", &m).unwrap(),
        }],
    };
    let (t2, m2) = load_entry(dir.path(), &sample, &sample.entries[0]).unwrap();
    assert_eq!(t2, t);
    // Map files hold f32 samples.
    let quantized: Vec<f64> = m.power_dbm.iter().map(|&v| v as f32 as f64).collect();
    assert_eq!(m2.power_dbm, quantized);
    assert_eq!(m2.grid, m.grid);
}

#[test]
fn flips_are_involutions() {
    let scene = generate_scene(11, &GenerationParams::default()).unwrap();
    let t = assemble_stage1(&scene, 1, &EncodeBounds::default()).unwrap();
    let m = simulate_radio_map(&scene, 1, &PropagationConfig::new(1, 0, 0)).unwrap();
    for a in [Augmentation::Vflip, Augmentation::Hflip, Augmentation::Rot180] {
        assert_eq!(a.apply_tensor(&a.apply_tensor(&t)), t);
        assert_eq!(a.apply_map(&a.apply_map(&m)), m);
        assert_ne!(a.apply_tensor(&t), t);
    }
}

fn max_diff(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f32::max)
}

#[test]
fn augmentation_commutes_with_encoding_and_tracing() {
    let scene = generate_scene(21, &GenerationParams::default()).unwrap();
    let bounds = EncodeBounds::default();
    let cfg = PropagationConfig::new(1, 1, 0);
    let t = assemble_stage1(&scene, 0, &bounds).unwrap();
    let m = simulate_radio_map(&scene, 0, &cfg).unwrap();
    for (a, t_aug, m_aug) in augment(&t, &m, &[Augmentation::Vflip, Augmentation::Hflip]) {
        let (v, h) = a.flips();
        let mirrored = scene.mirrored(h, v);
        let direct = assemble_stage1(&mirrored, 0, &bounds).unwrap();
        assert!(max_diff(&direct.data, &t_aug.data) < 1e-6, "{a:?}");
        let traced = simulate_radio_map(&mirrored, 0, &cfg).unwrap();
        let worst = traced
            .power_dbm
            .iter()
            .zip(&m_aug.power_dbm)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{a:?}: {worst} dB");
    }
}

#[test]
fn centred_transmitter_fspl_is_flip_symmetric() {
    let s = Scene::empty(28.0);
    for g in 0..2 {
        let f = fspl_map(&s, g).unwrap();
        for (v, h) in [(true, false), (false, true)] {
            let fl = f.flipped(v, h);
            let worst = f.values.iter().zip(&fl.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "{worst}");
        }
    }
}
