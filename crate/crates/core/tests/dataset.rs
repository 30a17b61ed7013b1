use procyarn::dataset::{
    build_curves, generate_dataset, read_manifest, regenerate, sample_and_generate, verify_row,
    Annotation, DatasetConfig, Split,
};
use procyarn::format::{decode_curves, encode_curves, read_curves};
use procyarn::raster::{coverage_fraction, random_crop, rasterize, RasterConfig};
use procyarn::{Error, RngStream};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn config(curves: bool) -> DatasetConfig {
    DatasetConfig {
        raster: RasterConfig::for_size(500, 150),
        levels: 3,
        write_curves: curves,
        threads: 0,
    }
}

#[test]
fn dataset_round_trips_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate_dataset(64, 1000, &config(true), dir.path()).unwrap();
    assert_eq!(manifest.rows.len(), 64);
    let back = read_manifest(dir.path()).unwrap();
    assert_eq!(back.rows, manifest.rows);
    assert_eq!(back.meta.split, Split { train: 59, val: 5 });
    for (i, row) in back.rows.iter().enumerate() {
        assert_eq!(row.seed, 1000 + i as u64);
        assert_eq!((row.width, row.height), (500, 150));
        let sample = verify_row(dir.path(), row).unwrap();
        let stored = read_curves(&procyarn::dataset::curve_path(dir.path(), &row.id)).unwrap();
        assert!(stored.bit_eq(&sample.curves), "curves differ for {}", row.id);
    }
}

#[test]
fn empty_dataset_has_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate_dataset(0, 5, &config(false), dir.path()).unwrap();
    assert!(manifest.rows.is_empty());
    let text = std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
    assert!(text.is_empty());
    assert_eq!(read_manifest(dir.path()).unwrap().meta.count, 0);
}

#[test]
fn full_split_matches_database_size() {
    assert_eq!(Split::for_count(4345), Split { train: 4000, val: 345 });
    for n in [0, 1, 10, 100, 5000] {
        let s = Split::for_count(n);
        assert_eq!(s.train + s.val, n);
    }
}

#[test]
fn annotation_write_read_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    for seed in [0u64, 1, u64::MAX] {
        let sample = sample_and_generate(seed, 3, RasterConfig::for_size(120, 40)).unwrap();
        let path = dir.path().join(format!("{seed}.json"));
        sample.annotation().write(&path).unwrap();
        let back = Annotation::read(&path).unwrap();
        assert_eq!(back, sample.annotation());
        let again = regenerate(&back).unwrap();
        assert!(again.curves.bit_eq(&sample.curves));
        assert_eq!(again.image.as_raw(), sample.image.as_raw());
    }
}

#[test]
fn curve_file_round_trip_of_real_yarn() {
    let sample = sample_and_generate(8, 3, RasterConfig::for_size(100, 30)).unwrap();
    let bytes = encode_curves(&sample.curves);
    assert!(decode_curves(&bytes).unwrap().bit_eq(&sample.curves));
    assert!(matches!(decode_curves(&bytes[..bytes.len() - 3]), Err(Error::Format(_))));
}

#[test]
fn coverage_grows_with_fiber_count() {
    let raster = RasterConfig::for_size(400, 120);
    let mut rng = RngStream::new(77);
    for _ in 0..20 {
        let (mut params, _) = procyarn::sampler::sample_yarn(&mut rng);
        params.fly.g = 0;
        let build = procyarn::dataset::build_config_for(3, &params.fly, &raster);
        let mut last = 0.0;
        for m in [20, 60, 200] {
            params.raw.m = m;
            let (curves, _) = build_curves(&params, 3, &build).unwrap();
            let frac = coverage_fraction(&rasterize(&curves, params.raw.t_x, &raster).unwrap());
            assert!(frac > 0.0 && frac < 1.0, "{frac}");
            assert!(frac >= last, "m {m}: {frac} < {last}");
            last = frac;
        }
    }
}

#[test]
fn crop_offsets_are_uniform() {
    let img = image::GrayImage::from_fn(20, 1, |x, _| image::Luma([x as u8]));
    let mut rng = RngStream::new(5);
    let bins = 16;
    let draws = 16_000;
    let mut counts = vec![0usize; bins];
    for _ in 0..draws {
        let crop = random_crop(&img, 5, 1, &mut rng).unwrap();
        counts[crop.get_pixel(0, 0).0[0] as usize] += 1;
    }
    let expected = draws as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(chi2);
    assert!(p > 0.01, "{counts:?}");
}
