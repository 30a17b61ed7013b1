//! Annotated samples and on-disk datasets.
//!
//! A dataset directory holds
//!
//! ```text
//! images/<id>.png          8-bit grayscale render
//! annotations/<id>.json    parameter record (the label)
//! curves/<id>.yfc          optional curve file
//! manifest.jsonl           one row per sample
//! dataset.json             run metadata and train/validation split
//! ```
//!
//! Every stochastic stage of a sample draws from its own stream of the
//! sample seed, so an annotation alone is enough to rebuild the curves and
//! the image bit for bit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use image::GrayImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flyaway::{add_flyaways, FlyawayReport};
use crate::format::write_curves;
use crate::hierarchy::build_raw_yarn;
use crate::params::{level_specs, BuildConfig, FlyawayParams, RawYarnParams, YarnParams};
use crate::polyline::PolyLineSet;
use crate::raster::{rasterize, RasterConfig};
use crate::rng::{stream, RngStream};
use crate::sampler::{sample_yarn, AuxSample};

pub const GENERATOR_VERSION: &str = concat!("procyarn ", env!("CARGO_PKG_VERSION"));

/// Full-scale training and validation set sizes.
pub const FULL_TRAIN: usize = 4000;
pub const FULL_VAL: usize = 345;

/// Label record stored next to every image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    #[serde(flatten)]
    pub raw: RawYarnParams,
    #[serde(flatten)]
    pub fly: FlyawayParams,
    pub seed: u64,
    pub generator_version: String,
    #[serde(default)]
    pub aux: Option<AuxSample>,
    pub build: BuildConfig,
    pub raster: RasterConfig,
}

impl Annotation {
    pub fn params(&self) -> YarnParams {
        YarnParams {
            raw: self.raw.clone(),
            fly: self.fly.clone(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct YarnSample {
    pub curves: PolyLineSet,
    pub params: YarnParams,
    pub aux: Option<AuxSample>,
    pub seed: u64,
    pub build: BuildConfig,
    pub raster: RasterConfig,
    pub image: GrayImage,
    pub flyaways: FlyawayReport,
}

impl YarnSample {
    pub fn annotation(&self) -> Annotation {
        Annotation {
            raw: self.params.raw.clone(),
            fly: self.params.fly.clone(),
            seed: self.seed,
            generator_version: GENERATOR_VERSION.to_string(),
            aux: self.aux.clone(),
            build: self.build.clone(),
            raster: self.raster.clone(),
        }
    }
}

/// Yarn length to build: the visible window plus a margin, and long enough
/// that the longest requested flyaway can be cut from a single fiber.
pub fn total_length_for(fly: &FlyawayParams, raster: &RasterConfig) -> f64 {
    let view = raster.view_length() + 2.0;
    let flyaway = 1.25 * fly.l_loop.max(fly.l_hair) + 1.0;
    view.max(flyaway)
}

pub fn build_config_for(levels: u32, fly: &FlyawayParams, raster: &RasterConfig) -> BuildConfig {
    BuildConfig {
        levels,
        total_length: total_length_for(fly, raster),
        ..BuildConfig::default()
    }
}

/// Curves only (raw yarn plus flyaways).
pub fn build_curves(
    params: &YarnParams,
    seed: u64,
    build: &BuildConfig,
) -> Result<(PolyLineSet, FlyawayReport)> {
    let specs = level_specs(&params.raw, build)?;
    let mut geo = RngStream::with_stream(seed, stream::GEOMETRY);
    let raw = build_raw_yarn(&specs, build.total_length, params.raw.alpha_f, &mut geo)?;
    let mut fly = RngStream::with_stream(seed, stream::FLYAWAYS);
    add_flyaways(&raw, &params.fly, &mut fly)
}

pub fn generate_sample(
    params: YarnParams,
    aux: Option<AuxSample>,
    seed: u64,
    build: BuildConfig,
    raster: RasterConfig,
) -> Result<YarnSample> {
    let (curves, flyaways) = build_curves(&params, seed, &build)?;
    let image = rasterize(&curves, params.raw.t_x, &raster)?;
    Ok(YarnSample {
        curves,
        params,
        aux,
        seed,
        build,
        raster,
        image,
        flyaways,
    })
}

/// Sample parameters from `seed` and generate the yarn.
pub fn sample_and_generate(seed: u64, levels: u32, raster: RasterConfig) -> Result<YarnSample> {
    let mut rng = RngStream::with_stream(seed, stream::PARAMS);
    let (params, aux) = sample_yarn(&mut rng);
    let build = build_config_for(levels, &params.fly, &raster);
    generate_sample(params, Some(aux), seed, build, raster)
}

pub fn regenerate(annotation: &Annotation) -> Result<YarnSample> {
    generate_sample(
        annotation.params(),
        annotation.aux.clone(),
        annotation.seed,
        annotation.build.clone(),
        annotation.raster.clone(),
    )
}

pub fn write_png(path: &Path, image: &GrayImage) -> Result<()> {
    image.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

pub fn read_png(path: &Path) -> Result<GrayImage> {
    Ok(image::open(path)?.into_luma8())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub id: String,
    pub seed: u64,
    pub image_path: String,
    pub annotation_path: String,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: usize,
    pub val: usize,
}

impl Split {
    /// Train/validation sizes; samples `0..train` are training samples.
    pub fn for_count(count: usize) -> Self {
        if count == FULL_TRAIN + FULL_VAL {
            return Self {
                train: FULL_TRAIN,
                val: FULL_VAL,
            };
        }
        let train = (count as f64 * FULL_TRAIN as f64 / (FULL_TRAIN + FULL_VAL) as f64).round() as usize;
        Self {
            train,
            val: count - train,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub generator_version: String,
    pub count: usize,
    pub base_seed: u64,
    pub levels: u32,
    pub raster: RasterConfig,
    pub split: Split,
}

#[derive(Debug, Clone)]
pub struct DatasetConfig {
    pub raster: RasterConfig,
    pub levels: u32,
    pub write_curves: bool,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            raster: RasterConfig::default(),
            levels: 3,
            write_curves: false,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub meta: DatasetMeta,
    pub rows: Vec<ManifestRow>,
}

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const META_FILE: &str = "dataset.json";

pub fn sample_id(index: usize) -> String {
    format!("{index:06}")
}

fn write_record(out_dir: &Path, index: usize, seed: u64, config: &DatasetConfig) -> Result<ManifestRow> {
    let sample = sample_and_generate(seed, config.levels, config.raster.clone())?;
    let id = sample_id(index);
    let image_path = format!("images/{id}.png");
    let annotation_path = format!("annotations/{id}.json");
    write_png(&out_dir.join(&image_path), &sample.image)?;
    sample.annotation().write(&out_dir.join(&annotation_path))?;
    if config.write_curves {
        write_curves(&out_dir.join(format!("curves/{id}.yfc")), &sample.curves)?;
    }
    Ok(ManifestRow {
        id,
        seed,
        image_path,
        annotation_path,
        width: config.raster.width,
        height: config.raster.height,
    })
}

/// Generate `count` samples with seeds `base_seed + i`.
///
/// On failure the manifest still lists every sample that completed before
/// the first failing index, and the error reports how many that was.
pub fn generate_dataset(count: usize, base_seed: u64, config: &DatasetConfig, out_dir: &Path) -> Result<Manifest> {
    for sub in ["images", "annotations", "curves"] {
        if sub == "curves" && !config.write_curves {
            continue;
        }
        let dir = out_dir.join(sub);
        fs::create_dir_all(&dir).map_err(|e| Error::io(dir, e))?;
    }
    let run = || -> Vec<Result<ManifestRow>> {
        (0..count)
            .into_par_iter()
            .map(|i| write_record(out_dir, i, base_seed.wrapping_add(i as u64), config))
            .collect()
    };
    let results = if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?
            .install(run)
    } else {
        run()
    };

    let mut rows = Vec::with_capacity(count);
    let mut failure = None;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let meta = DatasetMeta {
        generator_version: GENERATOR_VERSION.to_string(),
        count,
        base_seed,
        levels: config.levels,
        raster: config.raster.clone(),
        split: Split::for_count(count),
    };
    let manifest = Manifest { meta, rows };
    write_manifest(out_dir, &manifest)?;
    match failure {
        None => Ok(manifest),
        Some(e) => Err(Error::Dataset {
            completed: manifest.rows.len(),
            message: e.to_string(),
        }),
    }
}

pub fn write_manifest(out_dir: &Path, manifest: &Manifest) -> Result<()> {
    let path = out_dir.join(MANIFEST_FILE);
    let mut file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    for row in &manifest.rows {
        let line = serde_json::to_string(row)?;
        writeln!(file, "{line}").map_err(|e| Error::io(&path, e))?;
    }
    let meta_path = out_dir.join(META_FILE);
    let text = serde_json::to_string_pretty(&manifest.meta)?;
    fs::write(&meta_path, text).map_err(|e| Error::io(meta_path, e))
}

pub fn read_manifest(out_dir: &Path) -> Result<Manifest> {
    let path = out_dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect::<std::result::Result<Vec<ManifestRow>, _>>()?;
    let meta_path = out_dir.join(META_FILE);
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    Ok(Manifest {
        meta: serde_json::from_str(&meta_text)?,
        rows,
    })
}

/// Rebuild one manifest row from its annotation and compare against the
/// stored image. Returns the regenerated sample on success.
pub fn verify_row(out_dir: &Path, row: &ManifestRow) -> Result<YarnSample> {
    let annotation = Annotation::read(&out_dir.join(&row.annotation_path))?;
    if annotation.seed != row.seed {
        return Err(Error::Format(format!("seed mismatch for sample {}", row.id)));
    }
    let sample = regenerate(&annotation)?;
    let stored = read_png(&out_dir.join(&row.image_path))?;
    if stored.as_raw() != sample.image.as_raw() {
        return Err(Error::Format(format!("image mismatch for sample {}", row.id)));
    }
    Ok(sample)
}

/// Paths of one sample's files relative to a dataset directory.
pub fn curve_path(out_dir: &Path, id: &str) -> PathBuf {
    out_dir.join(format!("curves/{id}.yfc"))
}
