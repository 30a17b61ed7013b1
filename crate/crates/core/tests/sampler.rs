use std::f64::consts::TAU;

use procyarn::dataset::{sample_and_generate, Annotation};
use procyarn::raster::RasterConfig;
use procyarn::sampler::{sample_flyaway, sample_raw_yarn, sample_yarn, validate};
use procyarn::RngStream;

// (key, lo, hi); the t_x / t_y rows carry the swapped labels
const TABLE: &[(&str, f64, f64)] = &[
    ("m", 20.0, 200.0),
    ("t_x", 0.006, 0.02),
    ("t_y", 0.006, 0.01),
    ("alpha", -25.778, -0.476),
    ("n", 2.0, 6.0),
    ("r_x", 0.029, 0.789),
    ("r_y", 0.042, 0.830),
    ("alpha_ply", 0.639, 31.655),
    ("R_ply", 0.053, 1.486),
    ("j", 0.0, 0.3),
    ("j_xy", 0.0, 0.03),
    ("g", 30.0, 300.0),
    ("p", 0.35, 0.65),
    ("beta", 0.050, 1.571),
    ("l_hair", 0.222, 14.5),
    ("s", 0.0, 1.0),
    ("l_loop", 0.407, 34.627),
    ("d_mean", 0.394, 30.469),
    ("d_std", 0.007, 5.0),
];

fn flat(params: &procyarn::YarnParams) -> serde_json::Map<String, serde_json::Value> {
    let mut map = serde_json::to_value(&params.raw).unwrap().as_object().unwrap().clone();
    map.extend(serde_json::to_value(&params.fly).unwrap().as_object().unwrap().clone());
    map
}

#[test]
fn ten_thousand_samples_stay_in_table() {
    let mut rng = RngStream::new(2024);
    let (lo50, hi80) = (50f64.to_radians(), 80f64.to_radians());
    for _ in 0..10_000 {
        let (params, aux) = sample_yarn(&mut rng);
        let map = flat(&params);
        for (key, lo, hi) in TABLE {
            let v = map[*key].as_f64().unwrap();
            assert!(*lo <= v && v <= *hi, "{key} = {v}");
        }
        let raw = &params.raw;
        assert!(raw.alpha < 0.0 && raw.alpha_ply > 0.0);
        assert_eq!(raw.j_z, 0.0);
        let gamma = (-raw.alpha / (TAU * raw.r_x)).atan();
        let gamma_ply = (raw.alpha_ply / (TAU * raw.r_ply)).atan();
        assert!(gamma >= lo50 - 1e-9 && gamma <= hi80 + 1e-9);
        assert!(gamma_ply >= lo50 - 1e-9 && gamma_ply <= hi80 + 1e-9);
        assert!((gamma - aux.gamma).abs() <= 1e-9);
        assert!((gamma_ply - aux.gamma_ply).abs() <= 1e-9);
        let density = raw.m as f64 * raw.t_x * raw.t_y / (raw.r_x * raw.r_x * aux.r_frac);
        assert!((density - aux.area_frac_ply).abs() <= 1e-12 * aux.area_frac_ply);
        assert!((raw.r_y / raw.r_x - aux.r_frac).abs() <= 1e-12);
        assert!(raw.t_x >= raw.t_y);
        assert!(validate(&params).is_valid(), "{:?}", validate(&params).violations);
    }
}

#[test]
fn sampling_is_deterministic_per_seed() {
    for seed in 0..50 {
        let a = sample_yarn(&mut RngStream::new(seed));
        let b = sample_yarn(&mut RngStream::new(seed));
        assert_eq!(a, b);
    }
}

#[test]
fn squeeze_mean_is_centered() {
    let mut rng = RngStream::new(99);
    let n = 100_000;
    let mean: f64 = (0..n).map(|_| sample_flyaway(&mut rng).s).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() < 0.01, "{mean}");
}

#[test]
fn ply_count_covers_its_range() {
    let mut rng = RngStream::new(3);
    let mut seen = [0usize; 7];
    for _ in 0..2000 {
        seen[sample_raw_yarn(&mut rng).params.n as usize] += 1;
    }
    assert!(seen[2..=6].iter().all(|&c| c > 0), "{seen:?}");
}

#[test]
fn annotation_has_every_table_key() {
    let sample = sample_and_generate(17, 3, RasterConfig::for_size(200, 60)).unwrap();
    let value = serde_json::to_value(sample.annotation()).unwrap();
    let obj = value.as_object().unwrap();
    for (key, lo, hi) in TABLE {
        let v = obj.get(*key).and_then(|v| v.as_f64()).unwrap_or_else(|| panic!("missing {key}"));
        assert!(*lo <= v && v <= *hi, "{key} = {v}");
    }
    assert_eq!(obj["seed"].as_u64(), Some(17));
    assert!(obj["generator_version"].as_str().unwrap().starts_with("procyarn"));
    let back: Annotation = serde_json::from_value(value).unwrap();
    assert_eq!(back, sample.annotation());
}

#[test]
fn validation_flags_out_of_range_edits() {
    let (mut params, _) = sample_yarn(&mut RngStream::new(1));
    params.raw.alpha = 1.0;
    params.fly.p = 0.9;
    let report = validate(&params);
    assert!(!report.is_valid());
    let names: Vec<&str> = report.violations.iter().map(|v| v.parameter.as_str()).collect();
    assert!(names.contains(&"alpha") && names.contains(&"p"), "{names:?}");
}
