mod common;

use common::isotropic_room;
use proptest::prelude::*;
use roomwave::baselines::{
    baseline_radio_map, bundled_models, find_model, parse_models, path_loss, BaselineGains, BaselineOptions,
    PathLossForm, PathLossModelSpec,
};
use roomwave::encode::fspl_map;
use roomwave::Error;

fn ci(n: f64) -> PathLossModelSpec {
    PathLossModelSpec::new("ci", PathLossForm::Ci, &[("n", n)]).unwrap()
}

#[test]
fn ci_spot_value() {
    let pl = path_loss(&ci(3.0), 10.0, 28.0).unwrap();
    assert!((pl - 91.39).abs() < 0.02, "{pl}");
    assert!((pl - 91.39094384872776).abs() < 1e-9);
}

#[test]
fn abg_spot_value() {
    let m = PathLossModelSpec::new("abg", PathLossForm::Abg, &[("alpha", 4.0), ("beta", 20.0), ("gamma", 2.0)]).unwrap();
    let pl = path_loss(&m, 10.0, 28.0).unwrap();
    assert!((pl - 88.94316062684439).abs() < 1e-9, "{pl}");
}

#[test]
fn zero_slope_gives_the_intercept() {
    let m = PathLossModelSpec::new("abg", PathLossForm::Abg, &[("alpha", 0.0), ("beta", 31.0), ("gamma", 0.0)]).unwrap();
    assert_eq!(path_loss(&m, 1.0, 28.0).unwrap(), 31.0);
    let pl = path_loss(&ci(0.0), 1.0, 28.0).unwrap();
    assert!((pl - 61.39094384872776).abs() < 1e-9);
}

#[test]
fn ci_with_exponent_two_is_free_space() {
    let s = isotropic_room(28.0);
    let mut m = ci(2.0);
    m.reference_distance = 0.01;
    for g in 0..2 {
        let base = baseline_radio_map(&s, g, &m, &BaselineOptions::default()).unwrap();
        let fspl = fspl_map(&s, g).unwrap();
        for (a, b) in base.power_dbm.iter().zip(&fspl.values) {
            assert!((a - b).abs() < 0.01, "{a} vs {b}");
        }
    }
}

#[test]
fn cif_without_frequency_weight_is_ci() {
    let cif = PathLossModelSpec::new("cif", PathLossForm::Cif, &[("n", 3.1), ("b", 0.0), ("f0", 24.2)]).unwrap();
    for d in [1.0, 2.5, 7.0, 19.0] {
        for f in [5.0, 28.0] {
            assert_eq!(path_loss(&cif, d, f).unwrap(), path_loss(&ci(3.1), d, f).unwrap());
        }
    }
}

#[test]
fn dual_slope_is_continuous_at_the_breakpoint() {
    let m = PathLossModelSpec::new(
        "dual",
        PathLossForm::AbgDual,
        &[("alpha", 1.7), ("beta", 33.0), ("gamma", 2.49), ("breakpoint", 6.9), ("alpha2", 4.17)],
    )
    .unwrap();
    let eps = 1e-12;
    let below = path_loss(&m, 6.9 - eps, 28.0).unwrap();
    let above = path_loss(&m, 6.9 + eps, 28.0).unwrap();
    assert!((below - above).abs() < 1e-9);
}

#[test]
fn distance_below_reference_is_a_domain_error() {
    assert!(matches!(path_loss(&ci(2.0), 0.5, 28.0), Err(Error::Domain(_))));
    assert!(matches!(path_loss(&ci(2.0), 2.0, 0.0), Err(Error::Domain(_))));
}

#[test]
fn missing_coefficient_is_a_config_error() {
    assert!(matches!(
        PathLossModelSpec::new("abg", PathLossForm::Abg, &[("alpha", 3.0)]),
        Err(Error::Config(_))
    ));
    let text = "[[model]]\nname = \"x\"\nform = \"CIF\"\ncoefficients = { n = 3.0 }\n";
    assert!(matches!(parse_models(text, "inline"), Err(Error::Config(_))));
}

#[test]
fn bundled_table_loads() {
    let models = bundled_models();
    assert_eq!(models.len(), 5);
    for m in &models {
        m.validate().unwrap();
        assert!(m.source.is_some(), "{} has no source", m.name);
    }
    assert_eq!(find_model(&models, "5gcm_abg").unwrap().form, PathLossForm::Abg);
    assert!(matches!(find_model(&models, "nope"), Err(Error::Config(_))));
}

#[test]
fn equal_distance_receivers_get_equal_values() {
    let s = isotropic_room(28.0);
    for m in bundled_models() {
        let map = baseline_radio_map(&s, 1, &m, &BaselineOptions::default()).unwrap();
        let (nx, ny) = (map.nx(), map.ny());
        for j in 0..ny {
            for i in 0..nx {
                assert!((map.at(i, j) - map.at(nx - 1 - i, ny - 1 - j)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn shadowing_is_seeded_and_off_by_default() {
    let s = isotropic_room(28.0);
    let m = find_model(&bundled_models(), "5gcm_abg").unwrap().clone();
    let plain = baseline_radio_map(&s, 0, &m, &BaselineOptions::default()).unwrap();
    let opts = BaselineOptions {
        shadow_seed: Some(9),
        ..Default::default()
    };
    let a = baseline_radio_map(&s, 0, &m, &opts).unwrap();
    let b = baseline_radio_map(&s, 0, &m, &opts).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, plain);
    let fixed = BaselineOptions {
        gains: BaselineGains::Fixed { gt_dbi: 3.0, gr_dbi: 2.0 },
        ..Default::default()
    };
    let g = baseline_radio_map(&s, 0, &m, &fixed).unwrap();
    for (x, y) in g.power_dbm.iter().zip(&plain.power_dbm) {
        assert!((x - y - 5.0).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn path_loss_is_monotone_in_distance(d in 1.0f64..40.0, step in 0.0f64..10.0, f in 1.0f64..60.0, idx in 0usize..5) {
        let m = &bundled_models()[idx];
        let a = path_loss(m, d, f).unwrap();
        let b = path_loss(m, d + step, f).unwrap();
        prop_assert!(b >= a - 1e-12);
    }
}
