//! Classical (ρ, θ) Hough transform baseline with naive endpoint trimming.

use rayon::prelude::*;
use serde::Serialize;

use crate::edges::DirectionalEdgeMaps;
use crate::error::{Error, Result};
use crate::geom::Pixel;
use crate::overlay::Endpoints;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoughParams {
    /// Degrees per θ bin.
    pub theta_step: f64,
    /// Pixels per ρ bin.
    pub rho_step: f64,
    pub top_k: usize,
    /// Half-size of the square suppression window, in bins.
    pub nms_radius: usize,
    /// Inlier distance for endpoint trimming.
    pub inlier_distance: f64,
    /// Most missing pixels bridged inside one trimmed segment.
    pub max_gap: f64,
    /// Shortest trimmed piece kept.
    pub min_length: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        Self {
            theta_step: 1.0,
            rho_step: 1.0,
            top_k: 20,
            nms_radius: 2,
            inlier_distance: 1.0,
            max_gap: 2.0,
            min_length: 10.0,
        }
    }
}

/// Vote grid, row-major by θ: `votes[t * rho_bins + r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    pub theta_bins: usize,
    pub rho_bins: usize,
    pub theta_step: f64,
    pub rho_step: f64,
    /// ρ of bin 0 is `-rho_offset · rho_step`.
    pub rho_offset: usize,
    pub votes: Vec<u32>,
}

impl Accumulator {
    pub fn new(width: usize, height: usize, theta_step: f64, rho_step: f64) -> Result<Self> {
        if !(theta_step > 0.0) || !(rho_step > 0.0) {
            return Err(Error::argument("Hough bin sizes must be positive"));
        }
        let diag = ((width * width + height * height) as f64).sqrt();
        let theta_bins = (180.0 / theta_step).round().max(1.0) as usize;
        let rho_offset = (diag / rho_step).ceil() as usize;
        let rho_bins = 2 * rho_offset + 1;
        Ok(Self {
            theta_bins,
            rho_bins,
            theta_step,
            rho_step,
            rho_offset,
            votes: vec![0; theta_bins * rho_bins],
        })
    }

    pub fn theta_of(&self, t: usize) -> f64 {
        t as f64 * self.theta_step
    }

    pub fn rho_of(&self, r: usize) -> f64 {
        (r as f64 - self.rho_offset as f64) * self.rho_step
    }

    pub fn rho_bin(&self, rho: f64) -> usize {
        ((rho / self.rho_step).round() as i64 + self.rho_offset as i64) as usize
    }

    #[inline]
    pub fn get(&self, t: usize, r: usize) -> u32 {
        self.votes[t * self.rho_bins + r]
    }

    pub fn total(&self) -> u64 {
        self.votes.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn max(&self) -> u32 {
        self.votes.iter().copied().max().unwrap_or(0)
    }

    /// Votes scaled to `[0, 255]`, θ along rows.
    pub fn to_u8(&self) -> Vec<u8> {
        let m = self.max().max(1) as f64;
        self.votes
            .iter()
            .map(|&v| (v as f64 * 255.0 / m).round() as u8)
            .collect()
    }

    fn add(&mut self, x: f64, y: f64, trig: &[(f64, f64)]) {
        for (t, &(c, s)) in trig.iter().enumerate() {
            let r = self.rho_bin(x * c + y * s);
            self.votes[t * self.rho_bins + r] += 1;
        }
    }
}

fn trig_table(theta_bins: usize, theta_step: f64) -> Vec<(f64, f64)> {
    (0..theta_bins)
        .map(|t| {
            let a = (t as f64 * theta_step).to_radians();
            (a.cos(), a.sin())
        })
        .collect()
}

/// Vote `ρ = x cosθ + y sinθ` for every point and θ sample.
pub fn accumulate(
    points: &[Pixel],
    width: usize,
    height: usize,
    params: &HoughParams,
) -> Result<Accumulator> {
    let empty = Accumulator::new(width, height, params.theta_step, params.rho_step)?;
    let trig = trig_table(empty.theta_bins, empty.theta_step);
    let acc = points
        .par_chunks(1024)
        .fold(
            || empty.clone(),
            |mut acc, chunk| {
                for p in chunk {
                    acc.add(p.x as f64, p.y as f64, &trig);
                }
                acc
            },
        )
        .reduce(
            || empty.clone(),
            |mut a, b| {
                for (x, y) in a.votes.iter_mut().zip(&b.votes) {
                    *x += y;
                }
                a
            },
        );
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoughLine {
    /// Vote-weighted `ρ` around the peak.
    pub rho: f64,
    /// Vote-weighted `θ` around the peak.
    pub theta_deg: f64,
    /// Votes of the peak bin.
    pub votes: u32,
    pub theta_bin: usize,
    pub rho_bin: usize,
}

/// Cells of the square window around `(t, r)` as `(index, θ, ρ)`. The
/// θ axis wraps: past 180° the same line reappears at `(−ρ, θ − 180°)`,
/// and θ, ρ are reported continuous with the centre cell.
fn window_cells(acc: &Accumulator, t: usize, r: usize, radius: usize) -> Vec<(usize, f64, f64)> {
    let (nt, nr) = (acc.theta_bins as i64, acc.rho_bins as i64);
    let radius = radius as i64;
    let mut out = Vec::new();
    for dt in -radius..=radius {
        let tt = t as i64 + dt;
        let wrapped = tt < 0 || tt >= nt;
        let ti = tt.rem_euclid(nt) as usize;
        for dr in -radius..=radius {
            let rr = r as i64 + dr;
            if rr < 0 || rr >= nr {
                continue;
            }
            // mirror ρ when θ wrapped
            let ri = if wrapped {
                2 * acc.rho_offset as i64 - rr
            } else {
                rr
            };
            if ri < 0 || ri >= nr {
                continue;
            }
            let theta = tt as f64 * acc.theta_step;
            let rho = (rr - acc.rho_offset as i64) as f64 * acc.rho_step;
            out.push((ti * acc.rho_bins + ri as usize, theta, rho));
        }
    }
    out
}

/// Top-k accumulator peaks with square non-maxima suppression.
pub fn detect_lines(acc: &Accumulator, top_k: usize, nms_radius: usize) -> Vec<HoughLine> {
    let mut work = acc.votes.clone();
    let mut out = Vec::new();
    while out.len() < top_k {
        let mut best = (0usize, 0u32);
        for (k, &v) in work.iter().enumerate() {
            if v > best.1 {
                best = (k, v);
            }
        }
        if best.1 == 0 {
            break;
        }
        let (t, r) = (best.0 / acc.rho_bins, best.0 % acc.rho_bins);
        let window = window_cells(acc, t, r, nms_radius);
        // vote centroid over the suppression window: the two flanks of a
        // thin line peak on either side of its centre
        let (mut sw, mut st, mut sr) = (0.0, 0.0, 0.0);
        for &(k, theta, rho) in &window {
            let v = f64::from(work[k]);
            sw += v;
            st += v * theta;
            sr += v * rho;
        }
        out.push(HoughLine {
            rho: sr / sw,
            theta_deg: st / sw,
            votes: best.1,
            theta_bin: t,
            rho_bin: r,
        });
        for (k, _, _) in window {
            work[k] = 0;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoughSegment {
    pub a: Pixel,
    pub b: Pixel,
    pub rho: f64,
    pub theta_deg: f64,
    pub votes: u32,
    pub inliers: usize,
}

impl HoughSegment {
    pub fn length(&self) -> f64 {
        let (dx, dy) = ((self.b.x - self.a.x) as f64, (self.b.y - self.a.y) as f64);
        (dx * dx + dy * dy).sqrt()
    }
}

impl Endpoints for HoughSegment {
    fn endpoints(&self) -> (Pixel, Pixel) {
        (self.a, self.b)
    }
}

/// Cut a detected line into pieces supported by nearby points.
pub fn trim_line(line: &HoughLine, points: &[Pixel], params: &HoughParams) -> Vec<HoughSegment> {
    let (c, s) = {
        let a = line.theta_deg.to_radians();
        (a.cos(), a.sin())
    };
    // t runs along the line direction (−sinθ, cosθ)
    let mut proj: Vec<(f64, Pixel)> = points
        .iter()
        .filter(|p| (p.x as f64 * c + p.y as f64 * s - line.rho).abs() <= params.inlier_distance)
        .map(|p| (-(p.x as f64) * s + p.y as f64 * c, *p))
        .collect();
    proj.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    // gaps are counted in whole pixels along the dominant axis of the line
    let along_x = s.abs() >= c.abs();
    let step = |a: Pixel, b: Pixel| {
        if along_x {
            (b.x - a.x).abs()
        } else {
            (b.y - a.y).abs()
        }
    };
    let mut out = Vec::new();
    let mut start = 0;
    for k in 0..proj.len() {
        let last = k + 1 == proj.len();
        if last || step(proj[k].1, proj[k + 1].1) as f64 > params.max_gap + 1.0 + 1e-9 {
            let (t0, t1) = (proj[start].0, proj[k].0);
            if t1 - t0 >= params.min_length {
                let at = |t: f64| {
                    Pixel::new(
                        (line.rho * c - t * s).round() as i64,
                        (line.rho * s + t * c).round() as i64,
                    )
                };
                out.push(HoughSegment {
                    a: at(t0),
                    b: at(t1),
                    rho: line.rho,
                    theta_deg: line.theta_deg,
                    votes: line.votes,
                    inliers: k + 1 - start,
                });
            }
            start = k + 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoughResult {
    pub accumulator: Accumulator,
    pub lines: Vec<HoughLine>,
    pub segments: Vec<HoughSegment>,
}

/// Baseline on the edge points of `maps`.
pub fn hough_baseline(maps: &DirectionalEdgeMaps, params: &HoughParams) -> Result<HoughResult> {
    let points = maps.edge_points();
    let (w, h) = (maps.width(), maps.height());
    let accumulator = accumulate(&points, w, h, params)?;
    let lines = detect_lines(&accumulator, params.top_k, params.nms_radius);
    let clamp = |p: Pixel| Pixel::new(p.x.clamp(0, w as i64 - 1), p.y.clamp(0, h as i64 - 1));
    let segments = lines
        .iter()
        .flat_map(|l| trim_line(l, &points, params))
        .map(|mut s| {
            s.a = clamp(s.a);
            s.b = clamp(s.b);
            s
        })
        .collect();
    Ok(HoughResult {
        accumulator,
        lines,
        segments,
    })
}
