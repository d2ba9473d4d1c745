//! Synthetic scenes with exact ground truth.
//!
//! All randomness comes from `ChaCha8Rng` seeded with the scene's `rng_seed`,
//! so an image is bit-identical across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{orientation_diff, point_segment_distance};
use crate::image::Image;

/// Ground-truth segment with sub-pixel endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthSegment {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    /// Sign of the intensity change across the segment, 0 for thin lines.
    pub contrast: i8,
}

impl TruthSegment {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64, contrast: i8) -> Self {
        Self {
            x1,
            y1,
            x2,
            y2,
            contrast,
        }
    }

    pub fn length(&self) -> f64 {
        (self.x2 - self.x1).hypot(self.y2 - self.y1)
    }

    pub fn angle_deg(&self) -> f64 {
        (self.y2 - self.y1)
            .atan2(self.x2 - self.x1)
            .to_degrees()
            .rem_euclid(180.0)
    }

    /// Hough parameters `(ρ, θ)` with `θ ∈ [0°, 180°)`.
    pub fn rho_theta(&self) -> (f64, f64) {
        let theta = (self.angle_deg() + 90.0).rem_euclid(180.0);
        let a = theta.to_radians();
        (self.x1 * a.cos() + self.y1 * a.sin(), theta)
    }

    fn distance_to(&self, o: &TruthSegment) -> f64 {
        let (a, b) = ((self.x1, self.y1), (self.x2, self.y2));
        let (c, d) = ((o.x1, o.y1), (o.x2, o.y2));
        if segments_intersect(a, b, c, d) {
            return 0.0;
        }
        point_segment_distance(a, c, d)
            .min(point_segment_distance(b, c, d))
            .min(point_segment_distance(c, a, b))
            .min(point_segment_distance(d, a, b))
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn segments_intersect(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scene {
    #[serde(skip)]
    pub image: Image,
    pub truth: Vec<TruthSegment>,
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

/// Set every pixel whose centre lies within `half_width` of segment `s`.
pub fn draw_line(image: &mut Image, s: &TruthSegment, half_width: f64, value: f64) {
    let (a, b) = ((s.x1, s.y1), (s.x2, s.y2));
    let r = half_width.ceil() as i64 + 1;
    let x0 = (s.x1.min(s.x2).floor() as i64 - r).max(0);
    let x1 = (s.x1.max(s.x2).ceil() as i64 + r).min(image.width() as i64 - 1);
    let y0 = (s.y1.min(s.y2).floor() as i64 - r).max(0);
    let y1 = (s.y1.max(s.y2).ceil() as i64 + r).min(image.height() as i64 - 1);
    for y in y0..=y1 {
        for x in x0..=x1 {
            if point_segment_distance((x as f64, y as f64), a, b) <= half_width {
                image.set(x as usize, y as usize, value);
            }
        }
    }
}

/// Constraints on generated crossing lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingParams {
    pub min_length: f64,
    pub margin: f64,
    /// Smallest angle between two lines that cross.
    pub min_crossing_angle: f64,
    /// Smallest distance between two lines that do not cross.
    pub min_separation: f64,
    /// Pixels whose centre is within this distance of the segment are lit.
    pub half_width: f64,
    pub value: f64,
}

impl Default for CrossingParams {
    fn default() -> Self {
        Self {
            min_length: 100.0,
            margin: 4.0,
            min_crossing_angle: 40.0,
            min_separation: 10.0,
            half_width: 0.5,
            value: 255.0,
        }
    }
}

/// Binary image of `n` long one-pixel lines with many crossings.
pub fn gen_crossing_lines(n: usize, width: usize, height: usize, rng_seed: u64) -> Result<Scene> {
    gen_crossing_lines_with(n, width, height, rng_seed, &CrossingParams::default())
}

pub fn gen_crossing_lines_with(
    n: usize,
    width: usize,
    height: usize,
    rng_seed: u64,
    params: &CrossingParams,
) -> Result<Scene> {
    let (w, h) = (width as f64, height as f64);
    let m = params.margin;
    if w - 2.0 * m < params.min_length && h - 2.0 * m < params.min_length && n > 0 {
        return Err(Error::argument(format!(
            "{width}x{height} image cannot hold lines of length {}",
            params.min_length
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut truth: Vec<TruthSegment> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while truth.len() < n {
        attempts += 1;
        if attempts > 200_000 {
            return Err(Error::argument(format!(
                "could not place {n} lines in {width}x{height} under the spacing constraints"
            )));
        }
        if attempts.is_multiple_of(5_000) {
            truth.clear();
        }
        let s = TruthSegment::new(
            rng.random_range(m..w - 1.0 - m),
            rng.random_range(m..h - 1.0 - m),
            rng.random_range(m..w - 1.0 - m),
            rng.random_range(m..h - 1.0 - m),
            0,
        );
        if s.length() < params.min_length {
            continue;
        }
        let ok = truth.iter().all(|t| {
            let angle = orientation_diff(s.angle_deg(), t.angle_deg());
            let dist = s.distance_to(t);
            if dist == 0.0 {
                angle >= params.min_crossing_angle
            } else {
                dist >= params.min_separation || angle >= params.min_crossing_angle
            }
        });
        if ok {
            truth.push(s);
        }
    }
    let mut image = Image::filled(width, height, 0.0);
    for s in &truth {
        draw_line(&mut image, s, params.half_width, params.value);
    }
    Ok(Scene {
        image,
        truth,
        noise_sigma: 0.0,
        rng_seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TextureKind {
    FlatVsTexture,
    TextureVsTexture,
}

impl std::str::FromStr for TextureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat-vs-texture" => Ok(TextureKind::FlatVsTexture),
            "texture-vs-texture" => Ok(TextureKind::TextureVsTexture),
            _ => Err(Error::argument(format!("unknown texture kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TextureParams {
    pub size: usize,
    /// Rectangle pixels `[inset, size − inset)` on both axes.
    pub inset: usize,
    pub background_mean: f64,
    pub object_mean: f64,
    /// Half-width of the per-pixel uniform texture.
    pub uniform_range: f64,
}

impl Default for TextureParams {
    fn default() -> Self {
        Self {
            size: 200,
            inset: 50,
            background_mean: 90.0,
            object_mean: 190.0,
            uniform_range: 0.0,
        }
    }
}

/// Square object over a textured background. `sigma` is the Gaussian part
/// of the texture.
pub fn gen_textured_boundary(kind: TextureKind, sigma: f64, rng_seed: u64) -> Result<Scene> {
    gen_textured_boundary_with(kind, sigma, rng_seed, &TextureParams::default())
}

pub fn gen_textured_boundary_with(
    kind: TextureKind,
    sigma: f64,
    rng_seed: u64,
    params: &TextureParams,
) -> Result<Scene> {
    if !(sigma >= 0.0) || !(params.uniform_range >= 0.0) {
        return Err(Error::argument("texture parameters must be non-negative"));
    }
    let n = params.size;
    let k = params.inset;
    if 2 * k + 2 > n || k < 2 {
        return Err(Error::argument("rectangle inset does not fit the image"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let normal = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::argument(e.to_string()))?;
    let texel = |mean: f64, rng: &mut ChaCha8Rng| {
        let mut v = mean;
        if params.uniform_range > 0.0 {
            v += rng.random_range(-params.uniform_range..=params.uniform_range);
        }
        if sigma > 0.0 {
            v += normal.sample(rng);
        }
        v.clamp(0.0, 255.0)
    };
    let inside = |x: usize, y: usize| x >= k && x < n - k && y >= k && y < n - k;
    let mut image = Image::filled(n, n, 0.0);
    for y in 0..n {
        for x in 0..n {
            let v = if inside(x, y) {
                match kind {
                    TextureKind::FlatVsTexture => params.object_mean,
                    TextureKind::TextureVsTexture => texel(params.object_mean, &mut rng),
                }
            } else {
                texel(params.background_mean, &mut rng)
            };
            image.set(x, y, v);
        }
    }
    let (lo, hi) = (k as f64 - 0.5, (n - k) as f64 - 0.5);
    let c = if params.object_mean >= params.background_mean {
        1
    } else {
        -1
    };
    let truth = vec![
        TruthSegment::new(lo, lo, hi, lo, c),
        TruthSegment::new(hi, lo, hi, hi, c),
        TruthSegment::new(hi, hi, lo, hi, c),
        TruthSegment::new(lo, hi, lo, lo, c),
    ];
    Ok(Scene {
        image,
        truth,
        noise_sigma: sigma,
        rng_seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParams {
    pub size: usize,
    pub cells: usize,
    /// Side of each square, pixels.
    pub square: usize,
    pub background: f64,
    pub foreground: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            size: 256,
            cells: 3,
            square: 50,
            background: 60.0,
            foreground: 180.0,
        }
    }
}

/// Regular grid of bright squares; truth is every square side.
pub fn gen_segment_grid(params: &GridParams) -> Result<Scene> {
    let (n, c, s) = (params.size, params.cells, params.square);
    let pitch = n / c.max(1);
    if c == 0 || s + 8 > pitch {
        return Err(Error::argument("squares do not fit the grid pitch"));
    }
    let mut image = Image::filled(n, n, params.background);
    let mut truth = Vec::new();
    let sign = if params.foreground >= params.background {
        1
    } else {
        -1
    };
    for gy in 0..c {
        for gx in 0..c {
            let x0 = gx * pitch + (pitch - s) / 2;
            let y0 = gy * pitch + (pitch - s) / 2;
            for y in y0..y0 + s {
                for x in x0..x0 + s {
                    image.set(x, y, params.foreground);
                }
            }
            let (lo_x, hi_x) = (x0 as f64 - 0.5, (x0 + s) as f64 - 0.5);
            let (lo_y, hi_y) = (y0 as f64 - 0.5, (y0 + s) as f64 - 0.5);
            truth.push(TruthSegment::new(lo_x, lo_y, hi_x, lo_y, sign));
            truth.push(TruthSegment::new(hi_x, lo_y, hi_x, hi_y, sign));
            truth.push(TruthSegment::new(hi_x, hi_y, lo_x, hi_y, sign));
            truth.push(TruthSegment::new(lo_x, hi_y, lo_x, lo_y, sign));
        }
    }
    Ok(Scene {
        image,
        truth,
        noise_sigma: 0.0,
        rng_seed: 0,
    })
}

/// Add zero-mean white Gaussian noise and clamp to `[0, 255]`.
pub fn add_gaussian_noise(image: &Image, sigma: f64, rng_seed: u64) -> Result<Image> {
    if !(sigma >= 0.0) {
        return Err(Error::argument(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(image.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::argument(e.to_string()))?;
    let mut out = image.clone();
    for v in out.data_mut() {
        *v = (*v + normal.sample(&mut rng)).clamp(0.0, 255.0);
    }
    Ok(out)
}

/// A digital line through `(x0, y0)` at `angle_deg` covering Chebyshev
/// distances `0..=len`, with the listed distances left out. Each entry of
/// `gaps` is `(start, missing)`: pixels at `start..start + missing` are not
/// drawn, so the present pixels on either side are `missing + 1` apart.
pub fn line_pixels(
    x0: i64,
    y0: i64,
    angle_deg: f64,
    len: i64,
    gaps: &[(i64, i64)],
) -> Vec<(i64, i64)> {
    let a = angle_deg.to_radians();
    let (c, s) = (a.cos(), a.sin());
    let m = c.abs().max(s.abs());
    (0..=len)
        .filter(|e| !gaps.iter().any(|&(g, n)| *e >= g && *e < g + n))
        .map(|e| {
            let t = e as f64 / m;
            (
                (x0 as f64 + t * c).round() as i64,
                (y0 as f64 + t * s).round() as i64,
            )
        })
        .collect()
}
