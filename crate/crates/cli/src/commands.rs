use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use roomwave::baselines::{self, baseline_radio_map, BaselineOptions, PathLossModelSpec};
use roomwave::dataset::{Manifest, Split};
use roomwave::encode::{assemble_stage1, assemble_stage2, prediction_to_grid, Tensor};
use roomwave::formats::{self, atomic_write};
use roomwave::metrics::{evaluate, rmse, MapeUnit, MetricOptions};
use roomwave::pipeline::{build_dataset, generate_scenes, grid_index_for_height, PipelineConfig};
use roomwave::propagation::simulate_radio_map_with_workers;
use roomwave::render::write_heatmap_png;
use roomwave::scene::{read_scene, validate_scene, write_scene, Scene};
use roomwave::{Error, MapSource, RadioMap, Result};

use crate::{Command, Global};

pub const OUT_ENV: &str = "ROOMWAVE_OUT";

fn config(g: &Global) -> Result<PipelineConfig> {
    let mut cfg = match (&g.config, &g.profile) {
        (Some(path), _) => {
            let mut base = toml::Table::try_from(PipelineConfig::profile(g.profile.as_deref().unwrap_or("desk"))?)
                .map_err(|e| Error::Config(e.to_string()))?;
            let text = formats::read_text(path)?;
            let over: toml::Table = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            merge(&mut base, over);
            PipelineConfig::from_toml(&base.to_string(), &path.display().to_string())?
        }
        (None, Some(p)) => PipelineConfig::profile(p)?,
        (None, None) => PipelineConfig::desk(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(c) = g.count {
        let augs = cfg.augmentations.len();
        if c != cfg.count {
            // Keep the split proportions of the base profile.
            let total: usize = cfg.split.sizes.iter().sum();
            let n = c * augs;
            let val = n * cfg.split.sizes[1] / total;
            let test = n * cfg.split.sizes[2] / total;
            cfg.split.sizes = [n - val - test, val, test];
        }
        cfg.count = c;
    }
    if !g.freq.is_empty() {
        cfg.frequencies_ghz = g.freq.clone();
    }
    if !g.grid_height.is_empty() {
        cfg.grid_heights = g.grid_height.clone();
    }
    if let Some(w) = g.workers {
        cfg.workers = w;
    }
    cfg.out = Some(out_root(g, &cfg));
    cfg.validate()?;
    Ok(cfg)
}

/// Recursive table merge; `over` wins.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn out_root(g: &Global, cfg: &PipelineConfig) -> PathBuf {
    g.out
        .clone()
        .or_else(|| cfg.out.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("roomwave-out"))
}

/// Scene files from paths (directories expand to their sorted `*.json`), or
/// freshly generated scenes when none are given. Returns `(stem, scene)`.
fn load_scenes(paths: &[PathBuf], cfg: &PipelineConfig) -> Result<Vec<(String, Scene)>> {
    if paths.is_empty() {
        return Ok(generate_scenes(cfg)?
            .into_iter()
            .enumerate()
            .map(|(i, s)| (format!("s{i:04}"), s))
            .collect());
    }
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut v: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            v.sort();
            files.extend(v);
        } else {
            files.push(p.clone());
        }
    }
    files
        .iter()
        .map(|f| {
            if !f.exists() {
                return Err(Error::io(f, std::io::Error::from(std::io::ErrorKind::NotFound)));
            }
            let stem = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let scene = read_scene(f)?;
            let violations = validate_scene(&scene);
            if !violations.is_empty() {
                let list: Vec<String> = violations.iter().map(|v| format!("{:?}: {}", v.rule, v.detail)).collect();
                return Err(Error::Validation(format!("{}: {}", f.display(), list.join("; "))));
            }
            Ok((stem, scene))
        })
        .collect()
}

fn freq_tag(f: f64) -> String {
    format!("{f}").replace('.', "p")
}

/// `(frequency, grid index)` pairs selected by the config.
fn selections(cfg: &PipelineConfig, scene: &Scene) -> Result<Vec<(f64, usize)>> {
    let mut v = Vec::new();
    for &f in &cfg.frequencies_ghz {
        for &h in &cfg.grid_heights {
            v.push((f, grid_index_for_height(scene, h)?));
        }
    }
    Ok(v)
}

pub fn run(g: &Global, cmd: &Command) -> Result<()> {
    let cfg = config(g)?;
    let out = cfg.out.clone().expect("output root resolved");
    match cmd {
        Command::Generate => {
            for (stem, s) in load_scenes(&[], &cfg)? {
                write_scene(&s, &out.join("scenes").join(format!("{stem}.json")))?;
            }
            eprintln!("wrote {} scenes to {}", cfg.count, out.join("scenes").display());
            Ok(())
        }
        Command::Simulate { scenes } => {
            for (stem, s) in load_scenes(scenes, &cfg)? {
                for (f, gi) in selections(&cfg, &s)? {
                    let sf = s.with_frequency(f);
                    let m = simulate_radio_map_with_workers(&sf, gi, &cfg.propagation, Some(cfg.workers))?;
                    let path = out.join("maps").join(format!("{stem}-f{}-g{gi}.bin", freq_tag(f)));
                    m.write(&path)?;
                    eprintln!("{}: median {:.2} dBm", path.display(), m.median());
                }
            }
            Ok(())
        }
        Command::Encode {
            scenes,
            stage1_prediction,
        } => {
            let pred = match stage1_prediction {
                Some(p) => Some(Tensor::read(p)?.raster(0)),
                None => None,
            };
            for (stem, s) in load_scenes(scenes, &cfg)? {
                for (f, gi) in selections(&cfg, &s)? {
                    let sf = s.with_frequency(f);
                    let (t, kind) = match &pred {
                        Some(p) => (assemble_stage2(&sf, p, &cfg.bounds)?, "stage2"),
                        None => (assemble_stage1(&sf, gi, &cfg.bounds)?, "stage1"),
                    };
                    let path = out.join("tensors").join(format!("{stem}-f{}-g{gi}-{kind}.bin", freq_tag(f)));
                    t.write(&path)?;
                    eprintln!("{}", path.display());
                }
            }
            Ok(())
        }
        Command::Baseline {
            scenes,
            dataset,
            split,
            models,
            model,
        } => {
            let all = match models {
                Some(p) => baselines::load_models(p)?,
                None => baselines::bundled_models(),
            };
            let chosen: Vec<PathLossModelSpec> = if model.is_empty() {
                all
            } else {
                model
                    .iter()
                    .map(|n| baselines::find_model(&all, n).cloned())
                    .collect::<Result<_>>()?
            };
            match dataset {
                Some(root) => compare_baselines(root, split, &chosen, &out),
                None => {
                    let opts = BaselineOptions::default();
                    for (stem, s) in load_scenes(scenes, &cfg)? {
                        for (f, gi) in selections(&cfg, &s)? {
                            let sf = s.with_frequency(f);
                            for spec in &chosen {
                                let m = baseline_radio_map(&sf, gi, spec, &opts)?;
                                m.write(
                                    &out.join("baselines")
                                        .join(&spec.name)
                                        .join(format!("{stem}-f{}-g{gi}.bin", freq_tag(f))),
                                )?;
                            }
                        }
                    }
                    Ok(())
                }
            }
        }
        Command::Evaluate {
            targets,
            predictions,
            linear_mape,
            ms_ssim,
        } => {
            let opts = MetricOptions {
                mape_unit: if *linear_mape { MapeUnit::Linear } else { MapeUnit::Dbm },
                ms_ssim_levels: *ms_ssim,
                ..MetricOptions::default()
            };
            let report = evaluate_dirs(targets, predictions, &opts)?;
            report.write(&out)?;
            let p = &report.pooled;
            println!(
                "samples {}  rmse {:.4} dB  mae {:.4} dB  mape {:.4} %  r {}  ssim {:.4}",
                report.samples.len(),
                p.rmse_db,
                p.mae_db,
                p.mape_percent,
                p.pearson_r.map(|r| format!("{r:.4}")).unwrap_or_else(|| "undefined".into()),
                p.ssim
            );
            Ok(())
        }
        Command::BuildDataset => {
            let m = build_dataset(&cfg, &out, &|done, total| eprintln!("[{done}/{total}] scenes"))?;
            let [a, b, c] = m.split_sizes();
            println!("{} samples (train {a}, val {b}, test {c}) in {}", m.samples.len(), out.display());
            Ok(())
        }
        Command::Inspect { path } => inspect(path, g.out.as_deref()),
    }
}

/// Reads a prediction as a map on `grid`: either a radio map or a 128 x 128 tensor.
fn read_prediction(path: &Path, target: &RadioMap) -> Result<RadioMap> {
    let side = formats::sidecar_path(path);
    let text = formats::read_text(&side)?;
    if text.contains(roomwave::encode::tensor::TENSOR_FORMAT) {
        let t = Tensor::read(path)?;
        let r = prediction_to_grid(&t.raster(0), &target.grid)?;
        return RadioMap::new(
            target.grid.clone(),
            r.values,
            target.frequency_ghz,
            MapSource::Prediction {
                model: path.display().to_string(),
            },
            target.scene_hash.clone(),
        );
    }
    RadioMap::read(path)
}

fn bin_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|f| f.extension().is_some_and(|x| x == "bin"))
        .collect();
    v.sort();
    Ok(v)
}

fn evaluate_dirs(targets: &Path, predictions: &Path, opts: &MetricOptions) -> Result<roomwave::metrics::MetricsReport> {
    let mut pairs = Vec::new();
    for t in bin_files(targets)? {
        let name = t.file_name().expect("file name").to_owned();
        let p = predictions.join(&name);
        if !p.exists() {
            return Err(Error::NotFound {
                id: name.to_string_lossy().into_owned(),
                path: p,
            });
        }
        let y = RadioMap::read(&t)?;
        let yhat = read_prediction(&p, &y)?;
        pairs.push((name.to_string_lossy().into_owned(), y, yhat));
    }
    let refs: Vec<(String, &RadioMap, &RadioMap)> = pairs.iter().map(|(id, y, h)| (id.clone(), y, h)).collect();
    evaluate(&refs, opts)
}

/// Pooled RMSE of every model against a dataset split, one CSV column per
/// (frequency, grid height) scenario plus the overall value.
fn compare_baselines(root: &Path, split: &str, models: &[PathLossModelSpec], out: &Path) -> Result<()> {
    let split = match split {
        "train" => Split::Train,
        "val" => Split::Val,
        "test" => Split::Test,
        s => return Err(Error::Config(format!("unknown split '{s}'"))),
    };
    let manifest = Manifest::read(root)?;
    let opts = BaselineOptions::default();
    let mut scenarios: BTreeMap<String, Vec<(RadioMap, usize)>> = BTreeMap::new();
    let mut scenes: BTreeMap<String, Scene> = BTreeMap::new();
    let mut jobs = Vec::new();
    for s in manifest.split_samples(split) {
        if !scenes.contains_key(&s.scene.path) {
            scenes.insert(s.scene.path.clone(), read_scene(&root.join(&s.scene.path))?);
        }
        for e in &s.entries {
            let (_, target) = roomwave::dataset::load_entry(root, s, e)?;
            let key = format!("f{}_h{}", freq_tag(e.frequency_ghz), e.grid_height);
            jobs.push((s.scene.path.clone(), s.augmentation, e.frequency_ghz, e.grid_index, key.clone()));
            scenarios.entry(key).or_default().push((target, jobs.len() - 1));
        }
    }
    let keys: Vec<String> = scenarios.keys().cloned().collect();
    let mut csv = format!("model,{},overall\n", keys.join(","));
    for spec in models {
        let mut row = spec.name.clone();
        let (mut ally, mut allh) = (Vec::new(), Vec::new());
        for k in &keys {
            let (mut ys, mut hs) = (Vec::new(), Vec::new());
            for (target, job) in &scenarios[k] {
                let (scene_path, aug, f, gi, _) = &jobs[*job];
                let sf = scenes[scene_path].with_frequency(*f);
                let m = aug.apply_map(&baseline_radio_map(&sf, *gi, spec, &opts)?);
                ys.extend_from_slice(&target.power_dbm);
                hs.extend_from_slice(&m.power_dbm);
            }
            row.push_str(&format!(",{}", rmse(&ys, &hs)?));
            ally.extend(ys);
            allh.extend(hs);
        }
        row.push_str(&format!(",{}\n", rmse(&ally, &allh)?));
        print!("{row}");
        csv.push_str(&row);
    }
    atomic_write(&out.join("baseline_comparison.csv"), csv.as_bytes())
}

fn inspect(path: &Path, out: Option<&Path>) -> Result<()> {
    if path.is_dir() {
        let m = Manifest::read(path)?;
        let [a, b, c] = m.split_sizes();
        println!("dataset {}", path.display());
        println!("  scenes {}  samples {}  seed {}", m.scene_count, m.samples.len(), m.seed);
        println!("  splits train {a} val {b} test {c} (requested {:?})", m.split.requested);
        println!("  frequencies {:?} GHz  grids {:?} m", m.frequencies_ghz, m.grid_heights);
        println!("  propagation {}", m.propagation.label());
        return m.verify(path).map(|_| println!("  all files verified"));
    }
    match path.extension().and_then(|x| x.to_str()) {
        Some("json") => {
            let s = read_scene(path)?;
            println!("scene {} (seed {}, {} GHz)", path.display(), s.seed, s.frequency_ghz);
            println!(
                "  room {} x {} x {} m, tx at ({:.3}, {:.3}, {:.3})",
                s.room.width, s.room.depth, s.room.height, s.tx.position.x, s.tx.position.y, s.tx.position.z
            );
            for (i, o) in s.obstacles.iter().enumerate() {
                let c = o.centroid();
                println!(
                    "  obstacle {i}: {:?} {} at ({:.2}, {:.2}), area {:.3} m2",
                    o.kind,
                    o.material,
                    c.x,
                    c.y,
                    o.area()
                );
            }
            Ok(())
        }
        Some("bin") => {
            let text = formats::read_text(&formats::sidecar_path(path))?;
            if text.contains(roomwave::encode::tensor::TENSOR_FORMAT) {
                let t = Tensor::read(path)?;
                println!("tensor {} {}x{}x{}", path.display(), t.channels, t.height, t.width);
                for c in 0..t.channels {
                    let v = t.channel(c);
                    let lo = v.iter().copied().fold(f32::INFINITY, f32::min);
                    let hi = v.iter().copied().fold(f32::NEG_INFINITY, f32::max);
                    println!("  {:?}: [{lo}, {hi}] bounds {:?}", t.tags[c], t.bounds[c]);
                }
                return Ok(());
            }
            let m = RadioMap::read(path)?;
            let v = &m.power_dbm;
            let q = |p| roomwave::metrics::quantile(v, p);
            println!("map {} {}x{} at {} GHz, grid height {} m", path.display(), m.nx(), m.ny(), m.frequency_ghz, m.grid.height);
            println!("  source {:?}", m.source);
            println!(
                "  dBm min {:.2} p10 {:.2} median {:.2} p90 {:.2} max {:.2}",
                q(0.0),
                q(0.1),
                q(0.5),
                q(0.9),
                q(1.0)
            );
            let png = match out {
                Some(dir) => dir.join(path.with_extension("png").file_name().expect("file name")),
                None => path.with_extension("png"),
            };
            write_heatmap_png(&m, &png)?;
            println!("  heatmap {}", png.display());
            Ok(())
        }
        _ => Err(Error::Config(format!("cannot inspect {}", path.display()))),
    }
}
