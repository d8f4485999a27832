use std::path::Path;
use std::process::{Command, Output};

use roomwave::scene::{generate_scene, read_scene, write_scene, GenerationParams};

const SMALL: &str = r#"
count = 2
seed = 3

[propagation]
max_reflections = 1
max_transmissions = 1
max_diffractions = 0

[split]
sizes = [3, 3, 0]
"#;

fn roomwave(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roomwave"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("ROOMWAVE_OUT")
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn small_config(dir: &Path) -> String {
    let p = dir.join("small.toml");
    std::fs::write(&p, SMALL).unwrap();
    p.display().to_string()
}

#[test]
fn generate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = roomwave(&["generate", "--count", "10", "--seed", "7"], out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let fa = files(&a.join("scenes"));
    assert_eq!(fa.len(), 10);
    assert_eq!(fa, files(&b.join("scenes")));
}

#[test]
fn output_root_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_roomwave"))
        .args(["generate", "--count", "1"])
        .env("ROOMWAVE_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("scenes/s0000.json").exists());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "nonsense_field = 1\n").unwrap();
    for args in [
        vec!["generate", "--config", bad.to_str().unwrap()],
        vec!["generate", "--profile", "huge"],
        vec!["generate", "--freq=-5"],
        vec!["generate", "--grid-height", "2.0"],
        vec!["generate", "--workers", "0"],
    ] {
        let o = roomwave(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(err["code"], 2);
    }
}

#[test]
fn invalid_scene_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = generate_scene(2, &GenerationParams::default()).unwrap();
    let shift = s.tx.position.xy() - s.obstacles[0].centroid();
    for p in &mut s.obstacles[0].footprint {
        *p = *p + shift;
    }
    let path = dir.path().join("bad.json");
    write_scene(&s, &path).unwrap();
    let o = roomwave(&["simulate", "--scene", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn missing_inputs_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere");
    let m = missing.to_str().unwrap();
    let o = roomwave(&["evaluate", "--targets", m, "--predictions", m], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let o = roomwave(&["simulate", "--scene", dir.path().join("x.json").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn simulate_evaluate_inspect_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("run");
    let o = roomwave(&["--config", &cfg, "--grid-height", "1.06", "simulate"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let maps = out.join("maps");
    assert_eq!(files(&maps).iter().filter(|(n, _)| n.ends_with(".bin")).count(), 2);

    let report_dir = dir.path().join("report");
    let m = maps.to_str().unwrap();
    let o = roomwave(&["evaluate", "--targets", m, "--predictions", m], &report_dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("rmse 0.0000") && stdout.contains("ssim 1.0000"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pooled"]["rmse_db"], 0.0);
    assert_eq!(report["pooled"]["pearson_r"], 1.0);

    let map = maps.join("s0000-f28-g1.bin");
    let o = roomwave(&["inspect", map.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("s0000-f28-g1.png").exists());
}

#[test]
fn encode_writes_both_stages() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = roomwave(&["--count", "1", "--grid-height", "0.765", "encode"], out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stage1 = out.join("tensors/s0000-f28-g0-stage1.bin");
    assert!(stage1.exists());

    let pred = roomwave::encode::Tensor::new(
        (1, 128, 128),
        vec![0.5; 128 * 128],
        vec![roomwave::encode::ChannelTag::Power],
        vec![Some(roomwave::encode::EncodeBounds::default().power)],
        None,
    )
    .unwrap();
    let pred_path = out.join("pred.bin");
    pred.write(&pred_path).unwrap();
    let o = roomwave(
        &["--count", "1", "--grid-height", "0.765", "encode", "--stage1-prediction", pred_path.to_str().unwrap()],
        out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = roomwave::encode::Tensor::read(&out.join("tensors/s0000-f28-g0-stage2.bin")).unwrap();
    assert_eq!((t.channels, t.height, t.width), (3, 256, 256));
    assert!(t.channel(2).iter().all(|&v| v == 0.5));
}

#[test]
fn build_dataset_and_compare_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("ds");
    let o = roomwave(&["--config", &cfg, "build-dataset"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("6 samples (train 3, val 3, test 0)"));

    let o = roomwave(&["inspect", out.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("all files verified"));

    let cmp = dir.path().join("cmp");
    let o = roomwave(
        &["--config", &cfg, "baseline", "--dataset", out.to_str().unwrap(), "--split", "train"],
        &cmp,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(cmp.join("baseline_comparison.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 6, "{csv}");
    assert!(lines[0].starts_with("model,") && lines[0].ends_with(",overall"));

    let scene = read_scene(&out.join("scenes/s0000.json")).unwrap();
    assert_eq!(scene.seed, 3);
}
