mod common;

use proptest::prelude::*;
use roomwave::metrics::{
    error_cdf, evaluate, mae, mape, ms_ssim, pearson, regularized_loss, rmse, ssim, MapeUnit, MetricOptions,
};
use roomwave::scene::Scene;
use roomwave::{Error, MapSource, RadioMap};

fn pair(k: usize, h: usize, w: usize) -> (Vec<f64>, Vec<f64>) {
    let kf = k as f64;
    let mut y = Vec::with_capacity(h * w);
    let mut yh = Vec::with_capacity(h * w);
    for r in 0..h {
        for c in 0..w {
            let (r, c) = (r as f64, c as f64);
            let v = -70.0 + 25.0 * (0.3 * c + 0.2 * r + kf).sin() + 8.0 * (0.05 * r * c + kf).cos();
            y.push(v);
            yh.push(v + 6.0 * (0.5 * c - 0.4 * r + 2.0 * kf).sin() + 0.7 * kf - 1.5);
        }
    }
    (y, yh)
}

#[test]
fn ssim_matches_reference_implementation() {
    let cases = [
        (30, 40, 0.9464152599351746),
        (65, 115, 0.9480079472439825),
        (24, 24, 0.9206038666644866),
        (50, 33, 0.9469795410030777),
        (128, 128, 0.9471821411042363),
    ];
    for (k, (h, w, want)) in cases.into_iter().enumerate() {
        let (y, yh) = pair(k, h, w);
        let got = ssim(&y, &yh, w, 120.0).unwrap();
        assert!((got - want).abs() < 1e-4, "case {k}: {got} vs {want}");
    }
}

#[test]
fn ssim_edge_cases() {
    let (y, _) = pair(0, 30, 40);
    assert!((ssim(&y, &y, 40, 120.0).unwrap() - 1.0).abs() < 1e-12);
    let shifted: Vec<f64> = y.iter().map(|v| v + 60.0).collect();
    assert!(ssim(&y, &shifted, 40, 120.0).unwrap() < 1.0);
    assert!(matches!(ssim(&y[..100], &y[..100], 10, 120.0), Err(Error::Domain(_))));
    assert!(matches!(ssim(&y, &y, 40, 0.0), Err(Error::Domain(_))));
    let (y, yh) = pair(4, 128, 128);
    let ms = ms_ssim(&y, &yh, 128, 120.0, 3).unwrap();
    assert!(ms > 0.0 && ms <= 1.0);
    assert!((ms_ssim(&y, &y, 128, 120.0, 3).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn hand_evaluated_examples() {
    assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 3.5355).abs() < 1e-4);
    assert_eq!(mae(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 3.5);
    assert!((mape(&[100.0, 200.0], &[110.0, 180.0], MapeUnit::Dbm).unwrap() - 10.0).abs() < 1e-12);
    assert!((mape(&[-50.0], &[-55.0], MapeUnit::Dbm).unwrap() - 10.0).abs() < 1e-12);
    assert_eq!(mape(&[-50.0, -60.0], &[-50.0, -60.0], MapeUnit::Dbm).unwrap(), 0.0);
    let y = [1.0, 4.0, 2.0, 8.0, 5.0];
    let neg: Vec<f64> = y.iter().map(|v| 7.0 - v).collect();
    let aff: Vec<f64> = y.iter().map(|v| 2.0 * v + 3.0).collect();
    assert!((pearson(&y, &y).unwrap() - 1.0).abs() < 1e-12);
    assert!((pearson(&y, &neg).unwrap() + 1.0).abs() < 1e-12);
    assert!((pearson(&y, &aff).unwrap() - 1.0).abs() < 1e-12);
    let zero = [0.0; 3];
    assert_eq!(regularized_loss(&[(&zero, &zero)], &[], 0.01).unwrap(), 0.0);
    let r = regularized_loss(&[(&zero, &zero)], &[1.0, 1.0], 0.01).unwrap();
    assert!((r - 0.02f64.sqrt()).abs() < 1e-12);
    let cdf = error_cdf(&[0.0; 4], &[1.0, -2.0, 3.0, 4.0]).unwrap();
    assert_eq!(cdf.median(), 2.5);
    let pts: Vec<(f64, f64)> = cdf.points().collect();
    assert!(pts.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
    assert_eq!(pts.last().unwrap().1, 1.0);
    assert!(error_cdf(&y, &y).unwrap().errors.iter().all(|&e| e == 0.0));
}

#[test]
fn error_paths() {
    assert!(matches!(rmse(&[1.0, 2.0], &[1.0]), Err(Error::Contract(_))));
    match mape(&[0.0, -50.0, 0.0], &[1.0, -50.0, 1.0], MapeUnit::Dbm) {
        Err(Error::Domain(msg)) => assert!(msg.contains('0') && msg.contains('2'), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::Domain(_))));
    assert!(matches!(regularized_loss(&[], &[1.0], -0.1), Err(Error::Domain(_))));
}

#[test]
fn mape_and_pearson_are_asymmetric() {
    let y = [-50.0, -60.0, -70.0];
    let yh = [-55.0, -58.0, -90.0];
    assert_ne!(mape(&y, &yh, MapeUnit::Dbm).unwrap(), mape(&yh, &y, MapeUnit::Dbm).unwrap());
    assert_eq!(rmse(&y, &yh).unwrap(), rmse(&yh, &y).unwrap());
    assert_eq!(mae(&y, &yh).unwrap(), mae(&yh, &y).unwrap());
}

fn map(values: Vec<f64>) -> RadioMap {
    let s = Scene::empty(28.0);
    RadioMap::new(s.rx_grids[0].clone(), values, 28.0, MapSource::Prediction { model: "t".into() }, "h".into()).unwrap()
}

#[test]
fn evaluating_targets_against_themselves() {
    let n = 115 * 65;
    let (y, _) = pair(1, 65, 115);
    let a = map(y);
    let c = map(vec![-80.0; n]);
    let report = evaluate(&[("a".into(), &a, &a), ("c".into(), &c, &c)], &MetricOptions::default()).unwrap();
    assert_eq!(report.pooled.rmse_db, 0.0);
    assert_eq!(report.pooled.ssim, 1.0);
    assert_eq!(report.samples[0].metrics.pearson_r, Some(1.0));
    assert_eq!(report.samples[1].metrics.pearson_r, None);
    assert_eq!(report.receivers, 2 * n);

    let dir = tempfile::tempdir().unwrap();
    report.write(dir.path()).unwrap();
    for f in ["report.json", "samples.csv", "error_cdf.csv", "error_cdf.png"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn pooled_rmse_equals_unregularized_loss() {
    let (y0, h0) = pair(0, 65, 115);
    let (y1, h1) = pair(3, 65, 115);
    let (a, b, c, d) = (map(y0.clone()), map(h0.clone()), map(y1.clone()), map(h1.clone()));
    let report = evaluate(&[("0".into(), &a, &b), ("1".into(), &c, &d)], &MetricOptions::default()).unwrap();
    let loss = regularized_loss(&[(&y0, &h0), (&y1, &h1)], &[0.3, -2.0], 0.0).unwrap();
    assert!((report.pooled.rmse_db - loss).abs() < 1e-12);
}

proptest! {
    #[test]
    fn rmse_bounds_mae_and_is_symmetric(v in prop::collection::vec((-120.0f64..0.0, -120.0f64..0.0), 1..64)) {
        let (y, yh): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        let r = rmse(&y, &yh).unwrap();
        let m = mae(&y, &yh).unwrap();
        prop_assert!(r >= m - 1e-12 && m >= 0.0);
        prop_assert_eq!(r, rmse(&yh, &y).unwrap());
    }

    #[test]
    fn pearson_is_bounded(v in prop::collection::vec((-120.0f64..0.0, -120.0f64..0.0), 3..64)) {
        let (y, yh): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        if let Ok(r) = pearson(&y, &yh) {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn concatenated_rmse_is_the_pooled_loss(a in prop::collection::vec(-5.0f64..5.0, 1..30), b in prop::collection::vec(-5.0f64..5.0, 1..30)) {
        let za = vec![0.0; a.len()];
        let zb = vec![0.0; b.len()];
        let cat: Vec<f64> = a.iter().chain(&b).copied().collect();
        let zc = vec![0.0; cat.len()];
        let pooled = regularized_loss(&[(&za, &a), (&zb, &b)], &[], 0.0).unwrap();
        prop_assert!((rmse(&zc, &cat).unwrap() - pooled).abs() < 1e-12);
    }
}
