use procyarn::flyaway::{add_flyaways, make_hair, make_loop, select_segment, squeeze_factor};
use procyarn::polyline::{TAG_HAIR, TAG_LOOP};
use procyarn::sampler::sample_yarn;
use procyarn::{BuildConfig, FlyawayParams, PolyLineSet, RngStream, Strip, Vec3};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn straight_yarn(strips: usize, vertices: usize, spacing: f64) -> PolyLineSet {
    PolyLineSet::from_strips(
        (0..strips)
            .map(|k| {
                let a = k as f64;
                Strip::new(
                    1,
                    (0..vertices)
                        .map(|i| Vec3::new(0.4 * a.cos(), 0.4 * a.sin(), i as f64 * spacing))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn fly(g: u32, p: f64) -> FlyawayParams {
    FlyawayParams {
        g,
        p,
        beta: 0.6,
        l_hair: 1.0,
        s: 0.4,
        l_loop: 1.0,
        d_mean: 1.5,
        d_std: 0.2,
    }
}

fn sampled_yarn(seed: u64) -> (procyarn::YarnParams, PolyLineSet) {
    let (params, _) = sample_yarn(&mut RngStream::new(seed));
    let build = BuildConfig {
        total_length: 1.25 * params.fly.l_loop.max(params.fly.l_hair) + 1.0,
        ..BuildConfig::default()
    };
    let specs = procyarn::params::level_specs(&params.raw, &build).unwrap();
    let raw = procyarn::hierarchy::build_raw_yarn(
        &specs,
        build.total_length,
        params.raw.alpha_f,
        &mut RngStream::new(seed + 1),
    )
    .unwrap();
    (params, raw)
}

#[test]
fn segment_start_is_uniform() {
    // 200 vertices, 5-step segments: low index is uniform over 0..=194
    let yarn = straight_yarn(1, 200, 0.1);
    let bins = 195;
    let draws = 40_000;
    let mut counts = vec![0usize; bins];
    let mut rng = RngStream::new(11);
    for _ in 0..draws {
        let seg = select_segment(&yarn, 0.5 - 1e-9, &mut rng, 64).unwrap();
        assert_eq!(seg.vertices.len(), 6);
        counts[seg.low_index()] += 1;
    }
    let expected = draws as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(chi2);
    assert!(p > 0.01, "chi2 {chi2}, p {p}");
}

#[test]
fn loop_fraction_is_binomial() {
    let yarn = straight_yarn(8, 101, 0.1);
    for (seed, p) in [(1u64, 0.5), (2, 0.35), (3, 0.65)] {
        let (out, report) = add_flyaways(&yarn, &fly(10_000, p), &mut RngStream::new(seed)).unwrap();
        assert_eq!(report.skipped, 0);
        assert_eq!(out.len(), 8 + 10_000);
        let n = 10_000.0;
        let sigma = (n * p * (1.0 - p)).sqrt();
        let loops = report.loops as f64;
        assert!((loops - n * p).abs() <= 3.0 * sigma, "p {p}: {loops} loops");
        assert_eq!(out.count_level(TAG_LOOP), report.loops);
        assert_eq!(out.count_level(TAG_HAIR), report.hairs);
    }
}

#[test]
fn flyaways_leave_source_strips_untouched() {
    let (params, raw) = sampled_yarn(5);
    let (out, report) = add_flyaways(&raw, &params.fly, &mut RngStream::new(6)).unwrap();
    assert_eq!(out.len(), raw.len() + params.fly.g as usize - report.skipped);
    assert_eq!(report.loops + report.hairs + report.skipped, params.fly.g as usize);
    assert!(PolyLineSet::from_strips(out.strips[..raw.len()].to_vec()).bit_eq(&raw));
}

#[test]
fn loops_preserve_endpoints_and_heights() {
    for seed in 0..20u64 {
        let (params, raw) = sampled_yarn(seed);
        let mut rng = RngStream::new(seed + 100);
        let seg = select_segment(&raw, params.fly.l_loop, &mut rng, 64).unwrap();
        let looped = make_loop(&seg.vertices, params.fly.d_mean, params.fly.d_std, &mut rng).unwrap();
        assert_eq!(looped.len(), seg.vertices.len());
        let last = looped.len() - 1;
        assert!((looped[0] - seg.vertices[0]).norm() <= 1e-9);
        assert!((looped[last] - seg.vertices[last]).norm() <= 1e-9);
        for (a, b) in looped.iter().zip(&seg.vertices) {
            assert_eq!(a.z, b.z);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hair_lowest_vertex_is_fixed(
        beta in 0.0f64..1.6,
        s in 0.0f64..1.0,
        seed in 0u64..10_000,
        len in 0.2f64..3.0,
    ) {
        let yarn = straight_yarn(5, 40, 0.1);
        let twisted = PolyLineSet::from_strips(yarn.strips.iter().map(|st| {
            Strip::new(1, st.vertices.iter().map(|v| {
                let (sn, cs) = (2.0 * v.z).sin_cos();
                Vec3::new(cs * v.x - sn * v.y, sn * v.x + cs * v.y, v.z)
            }).collect())
        }).collect());
        let seg = select_segment(&twisted, len, &mut RngStream::new(seed), 64).unwrap();
        let hair = make_hair(&seg.vertices, beta, s);
        let low = seg.vertices.iter().copied().min_by(|a, b| a.z.total_cmp(&b.z)).unwrap();
        let k = seg.vertices.iter().position(|v| *v == low).unwrap();
        prop_assert!((hair[k] - low).norm() <= 1e-9);
        // rotation keeps distances to the pivot once the squeeze is applied
        let q = squeeze_factor(s);
        for (h, v) in hair.iter().zip(&seg.vertices) {
            let local = Vec3::new(v.x - low.x, v.y - low.y, (v.z - low.z) * q);
            prop_assert!(((h - low).norm() - local.norm()).abs() <= 1e-9);
        }
    }

    #[test]
    fn strip_count_accounts_for_every_flyaway(g in 0u32..300, p in 0.0f64..1.0, seed in 0u64..1000) {
        let yarn = straight_yarn(3, 30, 0.1);
        let mut params = fly(g, p);
        params.l_loop = 2.0;
        params.l_hair = 3.5;
        let (out, report) = add_flyaways(&yarn, &params, &mut RngStream::new(seed)).unwrap();
        prop_assert_eq!(out.len(), yarn.len() + g as usize - report.skipped);
        prop_assert_eq!(report.loops + report.hairs + report.skipped, g as usize);
    }
}

#[test]
fn segment_too_long_is_reported() {
    let yarn = straight_yarn(2, 10, 0.1);
    let err = select_segment(&yarn, 5.0, &mut RngStream::new(0), 64).unwrap_err();
    assert!(matches!(err, procyarn::Error::SegmentNotFound { attempts: 64, .. }));
    let (out, report) = add_flyaways(
        &yarn,
        &FlyawayParams { l_loop: 5.0, l_hair: 5.0, ..fly(10, 0.5) },
        &mut RngStream::new(0),
    )
    .unwrap();
    assert_eq!(report.skipped, 10);
    assert!(out.bit_eq(&yarn));
}
