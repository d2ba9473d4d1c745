//! The `straight` command line: `extract`, `bench` and `dump`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{Algorithm, Config, Overrides};
use crate::directions::DirectionStore;
use crate::edges::{edge_maps, DirectionalEdgeMaps, Orientation};
use crate::error::{Error, Result};
use crate::extract::{extract_from_store, LineSegment};
use crate::geom::Pixel;
use crate::hough::{hough_baseline, HoughSegment};
use crate::image::{load_image, save_image, write_pgm_bytes, Image};
use crate::length_map::{fill_pair, MapPair};
use crate::overlay::{render_overlay, render_svg};
use crate::score::{score, ScoreReport, ScoreTolerances, Seg};
use crate::synth::{
    add_gaussian_noise, gen_crossing_lines, gen_segment_grid, gen_textured_boundary, GridParams,
    Scene, TextureKind,
};

#[derive(Debug, Parser)]
#[command(
    name = "straight",
    version,
    about = "Connected line segment extraction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract segments from an image.
    Extract(ExtractArgs),
    /// Generate a synthetic scene, run a detector and score it.
    Bench(BenchArgs),
    /// Write edge maps, direction sets and length maps for one seed pixel.
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgorithmArg {
    Straight,
    Hough,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `key = value` config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    /// Edge threshold T in intensity levels.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Orientation histogram bins B.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Neighbourhood radius of the orientation histogram, pixels
    #[arg(long)]
    pub window_radius: Option<f64>,
    /// Maximum gap d between connected matches.
    #[arg(long)]
    pub max_gap: Option<i64>,
    /// Uncertainty ball radius R.
    #[arg(long)]
    pub uncertainty_radius: Option<f64>,
    /// Length map size G.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Shortest reported segment, pixels
    #[arg(long)]
    pub min_length: Option<u32>,
    /// Disable the hierarchical zoom.
    #[arg(long)]
    pub no_zoom: bool,
    /// Gaussian noise sigma added before processing.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory for debug outputs.
    #[arg(long)]
    pub debug: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            algorithm: self.algorithm.map(|a| match a {
                AlgorithmArg::Straight => Algorithm::Straight,
                AlgorithmArg::Hough => Algorithm::Hough,
            }),
            threshold: self.threshold,
            bins: self.bins,
            window_radius: self.window_radius,
            max_gap: self.max_gap,
            uncertainty_radius: self.uncertainty_radius,
            position_range: None,
            grid: self.grid,
            min_length: self.min_length,
            zoom: self.no_zoom.then_some(false),
            sigma: self.sigma,
            seed: self.seed,
            threads: self.threads,
        }
    }

    pub fn resolve(&self) -> Result<Config> {
        let file = self.config.as_ref().map(Overrides::load).transpose()?;
        let c = Config::resolve(file.as_ref(), &self.overrides());
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Segment list; `.csv` for CSV, JSON otherwise. Stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Raster overlay (PNG, or PGM by extension).
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SceneKind {
    Crossing,
    FlatVsTexture,
    TextureVsTexture,
    Grid,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub scene: SceneKind,
    /// Number of lines for the crossing scene.
    #[arg(long, default_value_t = 8)]
    pub lines: usize,
    /// Image side for the crossing scene.
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Score the ground truth itself instead of running a detector.
    #[arg(long)]
    pub passthrough: bool,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Directory to save the scene image and truth.
    #[arg(long)]
    pub save_scene: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Seed pixel as `x,y`.
    #[arg(long, value_parser = parse_pixel)]
    pub pixel: Pixel,
    #[command(flatten)]
    pub common: Common,
}

fn parse_pixel(s: &str) -> std::result::Result<Pixel, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let x = x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?;
    let y = y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?;
    Ok(Pixel::new(x, y))
}

/// One output record, shared by both algorithms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentRecord {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
    pub length: f64,
    pub support: usize,
    pub theta_deg: f64,
}

impl From<&LineSegment> for SegmentRecord {
    fn from(s: &LineSegment) -> Self {
        Self {
            x1: s.p_minus.x,
            y1: s.p_minus.y,
            x2: s.p_plus.x,
            y2: s.p_plus.y,
            length: f64::from(s.length),
            support: s.support,
            theta_deg: s.theta_deg(),
        }
    }
}

impl From<&HoughSegment> for SegmentRecord {
    fn from(s: &HoughSegment) -> Self {
        Self {
            x1: s.a.x,
            y1: s.a.y,
            x2: s.b.x,
            y2: s.b.y,
            length: s.a.chebyshev(s.b) as f64,
            support: s.inliers,
            theta_deg: (s.theta_deg + 90.0).rem_euclid(180.0),
        }
    }
}

impl SegmentRecord {
    fn endpoints(&self) -> (Pixel, Pixel) {
        (Pixel::new(self.x1, self.y1), Pixel::new(self.x2, self.y2))
    }
}

pub fn records_json(records: &[SegmentRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

pub fn records_csv(records: &[SegmentRecord]) -> String {
    let mut s = String::from("x1,y1,x2,y2,length,support,theta_deg\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.x1, r.y1, r.x2, r.y2, r.length, r.support, r.theta_deg
        );
    }
    s
}

/// Result of a detector run on one image.
pub struct Detection {
    pub records: Vec<SegmentRecord>,
    pub maps: Option<DirectionalEdgeMaps>,
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::argument(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Run the configured algorithm, writing debug outputs when asked.
pub fn detect(image: &Image, config: &Config, debug: Option<&Path>) -> Result<Detection> {
    with_pool(config.threads, || detect_inner(image, config, debug))?
}

fn detect_inner(image: &Image, config: &Config, debug: Option<&Path>) -> Result<Detection> {
    let maps = edge_maps(image, config.extract.threshold)?;
    if let Some(dir) = debug {
        fs::create_dir_all(dir)?;
        write_edge_maps(&maps, dir)?;
    }
    let records = match config.algorithm {
        Algorithm::Straight => {
            let mut store = DirectionStore::build(&maps, &config.extract.histogram)?;
            if let Some(dir) = debug {
                fs::write(dir.join("directions.json"), directions_json(&store))?;
            }
            let result = extract_from_store(&mut store, &config.extract);
            result
                .segments
                .iter()
                .map(SegmentRecord::from)
                .filter(|r| r.length >= f64::from(config.extract.min_length))
                .collect()
        }
        Algorithm::Hough => {
            let result = hough_baseline(&maps, &config.hough)?;
            if let Some(dir) = debug {
                let acc = &result.accumulator;
                write_pgm_bytes(
                    dir.join("accumulator.pgm"),
                    acc.rho_bins,
                    acc.theta_bins,
                    &acc.to_u8(),
                )?;
            }
            result
                .segments
                .iter()
                .map(SegmentRecord::from)
                .filter(|r| r.length >= f64::from(config.extract.min_length))
                .collect()
        }
    };
    Ok(Detection {
        records,
        maps: Some(maps),
    })
}

fn write_edge_maps(maps: &DirectionalEdgeMaps, dir: &Path) -> Result<()> {
    for o in Orientation::ALL {
        let name = format!("edges_{}.pgm", o.degrees() as u32);
        write_pgm_bytes(
            dir.join(name),
            maps.width(),
            maps.height(),
            &maps.edge_plane_u8(o),
        )?;
    }
    Ok(())
}

/// Direction sets keyed by `"x,y"`, in row-major order.
pub fn directions_json(store: &DirectionStore) -> String {
    let mut obj = serde_json::Map::new();
    for p in store.seeds() {
        let entries = serde_json::to_value(store.entries(p)).expect("entries serialize");
        obj.insert(format!("{},{}", p.x, p.y), entries);
    }
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("json");
    s.push('\n');
    s
}

fn cmd_extract(args: &ExtractArgs) -> Result<()> {
    let config = args.common.resolve()?;
    let mut image = load_image(&args.input)?;
    if config.noise_sigma > 0.0 {
        image = add_gaussian_noise(&image, config.noise_sigma, config.rng_seed)?;
    }
    let det = detect(&image, &config, args.common.debug.as_deref())?;
    write_records(&det.records, args.output.as_deref())?;
    let ends: Vec<(Pixel, Pixel)> = det.records.iter().map(SegmentRecord::endpoints).collect();
    if let Some(p) = &args.overlay {
        render_overlay(&image, &ends, p)?;
    }
    if let Some(p) = &args.svg {
        render_svg(&image, &ends, p)?;
    }
    Ok(())
}

fn write_records(records: &[SegmentRecord], path: Option<&Path>) -> Result<()> {
    match path {
        None => print!("{}", records_json(records)),
        Some(p) => {
            let csv = p
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            fs::write(
                p,
                if csv {
                    records_csv(records)
                } else {
                    records_json(records)
                },
            )?;
        }
    }
    Ok(())
}

/// Build the named synthetic scene. Noise is applied to the crossing and
/// grid scenes; for textured scenes `sigma` is the texture strength.
pub fn make_scene(
    kind: SceneKind,
    lines: usize,
    size: usize,
    sigma: f64,
    seed: u64,
) -> Result<Scene> {
    match kind {
        SceneKind::Crossing => {
            let mut s = gen_crossing_lines(lines, size, size, seed)?;
            s.image = add_gaussian_noise(&s.image, sigma, seed.wrapping_add(1))?;
            s.noise_sigma = sigma;
            Ok(s)
        }
        SceneKind::FlatVsTexture => gen_textured_boundary(TextureKind::FlatVsTexture, sigma, seed),
        SceneKind::TextureVsTexture => {
            gen_textured_boundary(TextureKind::TextureVsTexture, sigma, seed)
        }
        SceneKind::Grid => {
            let mut s = gen_segment_grid(&GridParams::default())?;
            s.image = add_gaussian_noise(&s.image, sigma, seed)?;
            s.noise_sigma = sigma;
            s.rng_seed = seed;
            Ok(s)
        }
    }
}

#[derive(Debug, Serialize)]
struct BenchReport<'a> {
    scene: &'a str,
    algorithm: &'a str,
    rng_seed: u64,
    sigma: f64,
    truth: usize,
    report: ScoreReport,
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let config = args.common.resolve()?;
    let scene = make_scene(
        args.scene,
        args.lines,
        args.size,
        config.noise_sigma,
        config.rng_seed,
    )?;
    if let Some(dir) = &args.save_scene {
        fs::create_dir_all(dir)?;
        save_image(&scene.image, dir.join("scene.pgm"))?;
        fs::write(
            dir.join("truth.json"),
            serde_json::to_string_pretty(&scene.truth).expect("truth serializes"),
        )?;
    }
    let extracted: Vec<Seg> = if args.passthrough {
        scene.truth.iter().map(Seg::from).collect()
    } else {
        let det = detect(&scene.image, &config, args.common.debug.as_deref())?;
        det.records
            .iter()
            .map(|r| Seg::new((r.x1 as f64, r.y1 as f64), (r.x2 as f64, r.y2 as f64)))
            .collect()
    };
    let report = score(&extracted, &scene.truth, &ScoreTolerances::default());
    let scene_name = args
        .scene
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let out = BenchReport {
        scene: &scene_name,
        algorithm: if args.passthrough {
            "passthrough"
        } else {
            match config.algorithm {
                Algorithm::Straight => "straight",
                Algorithm::Hough => "hough",
            }
        },
        rng_seed: config.rng_seed,
        sigma: config.noise_sigma,
        truth: scene.truth.len(),
        report,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("report serializes");
    text.push('\n');
    match &args.output {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// The highest-scoring pair among the zoom children.
fn best_pair(pairs: &[MapPair]) -> Option<&MapPair> {
    pairs
        .iter()
        .enumerate()
        .max_by_key(|(k, p)| {
            (
                p.sum().into_iter().max().unwrap_or(0),
                std::cmp::Reverse(*k),
            )
        })
        .map(|(_, p)| p)
}

fn cmd_dump(args: &DumpArgs) -> Result<()> {
    let config = args.common.resolve()?;
    let dir = args
        .common
        .debug
        .clone()
        .ok_or_else(|| Error::argument("dump needs --debug DIR for its outputs"))?;
    let image = load_image(&args.input)?;
    let maps = edge_maps(&image, config.extract.threshold)?;
    if maps.edge_points().is_empty() {
        return Err(Error::argument("no edge points"));
    }
    let seed = args.pixel;
    if !maps.contains(seed) || !maps.is_edge_point(seed.x as usize, seed.y as usize) {
        return Err(Error::argument(format!(
            "pixel ({}, {}) is not an edge point",
            seed.x, seed.y
        )));
    }
    fs::create_dir_all(&dir)?;
    write_edge_maps(&maps, &dir)?;
    let store = with_pool(config.threads, || {
        DirectionStore::build(&maps, &config.extract.histogram)
    })??;
    fs::write(dir.join("directions.json"), directions_json(&store))?;
    for entry in store.entries(seed) {
        let (pairs, _) = fill_pair(seed, entry.theta, &store, &config.extract.map);
        let Some(pair) = best_pair(&pairs) else {
            continue;
        };
        for map in [&pair.plus, &pair.minus] {
            let stem = format!(
                "lengthmap_{}_{}_{:.4}_{}",
                seed.x,
                seed.y,
                entry.theta,
                map.half.name()
            );
            fs::write(dir.join(format!("{stem}.csv")), map.to_csv())?;
            let mut header = serde_json::to_string_pretty(&map.header_json()).expect("header");
            header.push('\n');
            fs::write(dir.join(format!("{stem}.json")), header)?;
        }
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Dump(a) => cmd_dump(a),
    }
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(Error::Argument(msg)) if msg.starts_with("usage:") => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
