//! `procyarn` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use procyarn::dataset::{
    self, build_config_for, generate_dataset, generate_sample, write_png, Annotation, DatasetConfig,
};
use procyarn::edit::{apply_overrides, from_flat, Override};
use procyarn::format::{curves_to_text, read_curves, write_curves};
use procyarn::inspect::summarize;
use procyarn::raster::RasterConfig;
use procyarn::rng::{stream, RngStream};
use procyarn::sampler::{sample_yarn, validate, ValidityReport};
use procyarn::{BuildConfig, Error, YarnParams};
use serde_json::{json, Map, Value};

const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "procyarn", version, about = "Procedural yarn geometry and synthetic datasets")]
struct Cli {
    /// Print machine-readable JSON summaries.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one yarn: curve file, image and annotation.
    Generate(Box<GenerateArgs>),
    /// Generate an annotated image dataset.
    Dataset(DatasetArgs),
    /// Regenerate a yarn from an annotation with edited parameters.
    Edit(EditArgs),
    /// Summarize a curve file.
    Inspect(InspectArgs),
}

#[derive(Args, Clone)]
struct ImageArgs {
    #[arg(long, default_value_t = 2000)]
    width: u32,
    #[arg(long, default_value_t = 600)]
    height: u32,
    /// Pixels per model unit; defaults to fitting the thickest yarn in 90% of the height.
    #[arg(long)]
    scale: Option<f64>,
}

impl ImageArgs {
    fn raster(&self) -> RasterConfig {
        let mut cfg = RasterConfig::for_size(self.width, self.height);
        if let Some(s) = self.scale {
            cfg.scale = s;
        }
        cfg
    }
}

/// Explicit parameter values, named after the parameter symbols.
#[derive(Args, Clone, Default)]
struct ParamArgs {
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    t_x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    r_x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r_y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_ply: Option<f64>,
    #[arg(long = "r-ply", allow_negative_numbers = true)]
    r_ply: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    j_xy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    j_z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_f: Option<f64>,
    #[arg(long)]
    g: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    l_hair: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    l_loop: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d_mean: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d_std: Option<f64>,
}

impl ParamArgs {
    fn to_map(&self) -> Map<String, Value> {
        let mut map = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        put("m", self.m.map(Value::from));
        put("t_x", self.t_x.map(Value::from));
        put("t_y", self.t_y.map(Value::from));
        put("alpha", self.alpha.map(Value::from));
        put("n", self.n.map(Value::from));
        put("r_x", self.r_x.map(Value::from));
        put("r_y", self.r_y.map(Value::from));
        put("alpha_ply", self.alpha_ply.map(Value::from));
        put("R_ply", self.r_ply.map(Value::from));
        put("j", self.j.map(Value::from));
        put("j_xy", self.j_xy.map(Value::from));
        put("j_z", self.j_z.map(Value::from));
        put("alpha_f", self.alpha_f.map(Value::from));
        put("g", self.g.map(Value::from));
        put("p", self.p.map(Value::from));
        put("beta", self.beta.map(Value::from));
        put("l_hair", self.l_hair.map(Value::from));
        put("s", self.s.map(Value::from));
        put("l_loop", self.l_loop.map(Value::from));
        put("d_mean", self.d_mean.map(Value::from));
        put("d_std", self.d_std.map(Value::from));
        map
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Seed for parameter sampling and geometry.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file of parameter values (or a full annotation); overrides flags.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Hierarchy depth counting the fiber line: 3 is fiber/ply/yarn.
    #[arg(long, default_value_t = 3)]
    levels: u32,
    /// Output path prefix; writes <prefix>.yfc, <prefix>.png and <prefix>.json.
    #[arg(long, default_value = "yarn")]
    out: PathBuf,
    /// Also write the plain-text curve dump <prefix>.txt.
    #[arg(long)]
    text: bool,
    /// Generate even when parameters fail validation.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    image: ImageArgs,
    #[command(flatten)]
    values: ParamArgs,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    levels: u32,
    /// Also write curve files.
    #[arg(long)]
    curves: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[command(flatten)]
    image: ImageArgs,
}

#[derive(Args)]
struct EditArgs {
    /// Annotation to start from.
    #[arg(long)]
    base: PathBuf,
    /// Set a parameter, `name=value`.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    sets: Vec<String>,
    /// Multiply a parameter, `name=factor`.
    #[arg(long = "scale", value_name = "NAME=FACTOR")]
    scales: Vec<String>,
    /// Seed for the regenerated yarn; defaults to the annotation's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "edited")]
    out: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    file: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::Image(_) | Error::Dataset { .. } => EXIT_IO,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn validation_failure(report: &ValidityReport) -> Failure {
    let lines: Vec<String> = report
        .violations
        .iter()
        .map(|v| format!("  {} = {}: {}", v.parameter, v.value, v.message))
        .collect();
    Failure {
        code: EXIT_VALIDATION,
        message: format!("parameter validation failed:\n{}", lines.join("\n")),
    }
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn read_json_object(path: &Path) -> Result<Map<String, Value>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::from(Error::Io {
        path: path.to_path_buf(),
        source: e,
    }))?;
    match serde_json::from_str(&text).map_err(Error::from)? {
        Value::Object(m) => Ok(m),
        _ => Err(Failure {
            code: EXIT_VALIDATION,
            message: format!("{} is not a JSON object", path.display()),
        }),
    }
}

const PARAM_KEYS: [&str; 21] = [
    "m", "t_x", "t_y", "alpha", "n", "r_x", "r_y", "alpha_ply", "R_ply", "j", "j_xy", "j_z", "alpha_f", "g", "p",
    "beta", "l_hair", "s", "l_loop", "d_mean", "d_std",
];

struct Written {
    curves: PathBuf,
    image: PathBuf,
    annotation: PathBuf,
}

fn write_sample(sample: &dataset::YarnSample, prefix: &Path, text: bool) -> Result<Written, Failure> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::from(Error::Io {
            path: dir.to_path_buf(),
            source: e,
        }))?;
    }
    let written = Written {
        curves: with_ext(prefix, "yfc"),
        image: with_ext(prefix, "png"),
        annotation: with_ext(prefix, "json"),
    };
    write_curves(&written.curves, &sample.curves)?;
    write_png(&written.image, &sample.image)?;
    sample.annotation().write(&written.annotation)?;
    if text {
        let path = with_ext(prefix, "txt");
        std::fs::write(&path, curves_to_text(&sample.curves))
            .map_err(|e| Failure::from(Error::Io { path, source: e }))?;
    }
    Ok(written)
}

fn sample_summary(sample: &dataset::YarnSample, written: &Written, report: &ValidityReport) -> Value {
    json!({
        "seed": sample.seed,
        "curves": written.curves,
        "image": written.image,
        "annotation": written.annotation,
        "strips": sample.curves.len(),
        "loops": sample.flyaways.loops,
        "hairs": sample.flyaways.hairs,
        "skipped_flyaways": sample.flyaways.skipped,
        "valid": report.is_valid(),
        "violations": report.violations,
    })
}

fn print_sample(json_out: bool, sample: &dataset::YarnSample, written: &Written, report: &ValidityReport) {
    if json_out {
        println!("{}", sample_summary(sample, written, report));
    } else {
        println!(
            "seed {}: {} strips ({} loops, {} hairs, {} skipped) -> {}, {}, {}",
            sample.seed,
            sample.curves.len(),
            sample.flyaways.loops,
            sample.flyaways.hairs,
            sample.flyaways.skipped,
            written.curves.display(),
            written.image.display(),
            written.annotation.display()
        );
    }
}

fn cmd_generate(args: &GenerateArgs, json_out: bool) -> Result<(), Failure> {
    let file = args.params.as_deref().map(read_json_object).transpose()?;
    let file_seed = file.as_ref().and_then(|m| m.get("seed")).and_then(Value::as_u64);
    let seed = args.seed.or(file_seed).ok_or_else(|| Failure {
        code: EXIT_VALIDATION,
        message: "a seed is required (--seed or a params file with \"seed\")".into(),
    })?;

    let mut rng = RngStream::with_stream(seed, stream::PARAMS);
    let (sampled, aux) = sample_yarn(&mut rng);
    let mut explicit = args.values.to_map();
    if let Some(m) = &file {
        explicit.extend(
            m.iter()
                .filter(|(k, _)| PARAM_KEYS.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone())),
        );
    }
    let customized = !explicit.is_empty();
    let params: YarnParams = from_flat(&explicit, &sampled)?;

    let report = validate(&params);
    if !report.is_valid() && !args.force {
        return Err(validation_failure(&report));
    }
    let raster = args.image.raster();
    let build = match file.as_ref().and_then(|m| m.get("build")) {
        Some(b) if args.levels == 3 => serde_json::from_value::<BuildConfig>(b.clone()).map_err(Error::from)?,
        _ => build_config_for(args.levels, &params.fly, &raster),
    };
    let aux = if customized { None } else { Some(aux) };
    let sample = generate_sample(params, aux, seed, build, raster)?;
    let written = write_sample(&sample, &args.out, args.text)?;
    print_sample(json_out, &sample, &written, &report);
    Ok(())
}

fn cmd_dataset(args: &DatasetArgs, json_out: bool) -> Result<(), Failure> {
    let config = DatasetConfig {
        raster: args.image.raster(),
        levels: args.levels,
        write_curves: args.curves,
        threads: args.threads,
    };
    let manifest = generate_dataset(args.count, args.base_seed, &config, &args.out)?;
    if json_out {
        println!(
            "{}",
            json!({
                "count": manifest.rows.len(),
                "out": args.out,
                "split": manifest.meta.split,
            })
        );
    } else {
        println!(
            "wrote {} samples to {} (train {}, val {})",
            manifest.rows.len(),
            args.out.display(),
            manifest.meta.split.train,
            manifest.meta.split.val
        );
    }
    Ok(())
}

fn cmd_edit(args: &EditArgs, json_out: bool) -> Result<(), Failure> {
    let base = Annotation::read(&args.base)?;
    let mut overrides = Vec::new();
    for s in &args.sets {
        overrides.push(Override::parse(s)?);
    }
    for s in &args.scales {
        let (k, f) = s.split_once('=').ok_or_else(|| Failure {
            code: EXIT_VALIDATION,
            message: format!("cannot parse scale '{s}', expected NAME=FACTOR"),
        })?;
        overrides.push(Override::parse(&format!("{k}*={f}"))?);
    }
    let params = apply_overrides(&base.params(), &overrides)?;
    let report = validate(&params);
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("warning: {} = {}: {}", v.parameter, v.value, v.message);
        }
    }
    let derived = build_config_for(base.build.levels, &params.fly, &base.raster);
    let build = BuildConfig {
        total_length: base.build.total_length.max(derived.total_length),
        ..base.build.clone()
    };
    let aux = if overrides.is_empty() { base.aux.clone() } else { None };
    let seed = args.seed.unwrap_or(base.seed);
    let sample = generate_sample(params, aux, seed, build, base.raster.clone())?;
    let written = write_sample(&sample, &args.out, false)?;
    print_sample(json_out, &sample, &written, &report);
    Ok(())
}

fn cmd_inspect(args: &InspectArgs, json_out: bool) -> Result<(), Failure> {
    let set = read_curves(&args.file)?;
    let s = summarize(&set);
    if json_out {
        println!("{}", serde_json::to_string(&s).map_err(Error::from)?);
    } else {
        println!("strips: {}  vertices: {}", s.strips, s.vertices);
        for (level, count) in &s.per_level {
            println!("  level {level}: {count}");
        }
        println!(
            "length min/mean/max: {:.4} / {:.4} / {:.4}",
            s.length_min, s.length_mean, s.length_max
        );
        println!("bbox: {:?} .. {:?}", s.bbox_min, s.bbox_max);
        println!("raw radius: {:.4}", s.raw_radius);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, cli.json),
        Command::Dataset(a) => cmd_dataset(a, cli.json),
        Command::Edit(a) => cmd_edit(a, cli.json),
        Command::Inspect(a) => cmd_inspect(a, cli.json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
