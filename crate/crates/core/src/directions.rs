//! Direction-coherent local orientation histograms and the per-pixel sets
//! of prominent directions derived from them.

use rayon::prelude::*;
use serde::Serialize;

use crate::edges::{polarity, select_directional_map, DirectionalEdgeMaps, Orientation};
use crate::error::{Error, Result};
use crate::geom::{orientation_diff, wrap180, Pixel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramParams {
    pub bins: usize,
    pub window_radius: f64,
    pub prominence_fraction: f64,
    /// Smallest accepted |signed count|, in edge points. Guards sparse bins
    /// where a couple of texture points already form a majority.
    pub min_votes: f64,
}

impl Default for HistogramParams {
    fn default() -> Self {
        Self {
            bins: 32,
            window_radius: 9.0,
            prominence_fraction: 0.5,
            min_votes: 3.0,
        }
    }
}

impl HistogramParams {
    pub fn bin_width(&self) -> f64 {
        180.0 / self.bins as f64
    }

    /// Half-bin tolerance Δθ = 90 / B.
    pub fn tolerance(&self) -> f64 {
        90.0 / self.bins as f64
    }

    pub fn bin_center(&self, b: usize) -> f64 {
        (b as f64 + 0.5) * self.bin_width()
    }

    /// The two bins bracketing `theta`, with linear weights.
    pub fn bracket(&self, theta: f64) -> [(usize, f64); 2] {
        let t = wrap180(theta) / self.bin_width() - 0.5;
        let lo = t.floor();
        let frac = t - lo;
        let b = self.bins as i64;
        let b0 = (lo as i64).rem_euclid(b) as usize;
        let b1 = (lo as i64 + 1).rem_euclid(b) as usize;
        [(b0, 1.0 - frac), (b1, frac)]
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::argument("histogram needs at least 2 bins"));
        }
        if !(self.window_radius >= 1.0) {
            return Err(Error::argument("window radius must be at least 1 pixel"));
        }
        if !(self.prominence_fraction > 0.0 && self.prominence_fraction <= 1.0) {
            return Err(Error::argument("prominence fraction must be in (0, 1]"));
        }
        Ok(())
    }

    fn window(&self) -> Vec<(i64, i64, f64)> {
        let r = self.window_radius;
        let ri = r.floor() as i64;
        let mut out = Vec::new();
        for dy in -ri..=ri {
            for dx in -ri..=ri {
                if (dx, dy) == (0, 0) || ((dx * dx + dy * dy) as f64) > r * r {
                    continue;
                }
                out.push((dx, dy, relative_angle(dx, dy)));
            }
        }
        out
    }
}

/// Orientation of the segment from the origin to `(dx, dy)`, in `[0, 180)`;
/// vertical offsets (`dx == 0`) give 90°.
pub fn relative_angle(dx: i64, dy: i64) -> f64 {
    if dx == 0 {
        return 90.0;
    }
    wrap180((dy as f64).atan2(dx as f64).to_degrees())
}

/// One prominent direction of an edge point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionEntry {
    /// Bin centre, degrees.
    pub theta: f64,
    /// `∇_θ I` at the edge point for the kernel selected by `theta`.
    pub grad: f64,
    /// Signed histogram count of the bin.
    pub strength: f64,
    #[serde(skip)]
    pub map: Orientation,
    pub live: bool,
}

impl DirectionEntry {
    pub fn polarity(&self, line_deg: f64) -> i8 {
        polarity(self.map, self.grad, line_deg)
    }

    /// Candidate-match condition against a hypothesised line orientation.
    pub fn matches(&self, line_deg: f64, tolerance: f64, seed_polarity: i8) -> bool {
        self.live
            && seed_polarity != 0
            && orientation_diff(self.theta, line_deg) <= 2.0 * tolerance + 1e-9
            && self.polarity(line_deg) == seed_polarity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProminentDirectionSet {
    pub seed: Pixel,
    pub bins: usize,
    pub entries: Vec<DirectionEntry>,
}

/// Raw histogram of one seed: signed weighted sums and weighted contributor
/// counts (each edge point adds its bracket weights to both).
pub fn orientation_histogram(
    maps: &DirectionalEdgeMaps,
    seed: Pixel,
    params: &HistogramParams,
) -> (Vec<f64>, Vec<f64>) {
    histogram_with_window(maps, seed, params, &params.window())
}

fn histogram_with_window(
    maps: &DirectionalEdgeMaps,
    seed: Pixel,
    params: &HistogramParams,
    window: &[(i64, i64, f64)],
) -> (Vec<f64>, Vec<f64>) {
    let mut acc = vec![0.0; params.bins];
    let mut count = vec![0.0; params.bins];
    let (w, h) = (maps.width() as i64, maps.height() as i64);
    for &(dx, dy, theta) in window {
        let (x, y) = (seed.x + dx, seed.y + dy);
        if x < 0 || y < 0 || x >= w || y >= h {
            continue;
        }
        let (xu, yu) = (x as usize, y as usize);
        if !maps.is_edge_point(xu, yu) {
            continue;
        }
        let value = f64::from(maps.edge(select_directional_map(theta), xu, yu));
        for (b, wgt) in params.bracket(theta) {
            acc[b] += value * wgt;
            count[b] += wgt;
        }
    }
    (acc, count)
}

fn entries_from_histogram(
    maps: &DirectionalEdgeMaps,
    seed: Pixel,
    params: &HistogramParams,
    acc: &[f64],
    count: &[f64],
) -> Vec<DirectionEntry> {
    let (x, y) = (seed.x as usize, seed.y as usize);
    (0..params.bins)
        .filter(|&b| {
            let need = (params.prominence_fraction * count[b]).max(params.min_votes);
            // the seed itself must show the transition its neighbours vote for
            let own = maps.edge(select_directional_map(params.bin_center(b)), x, y);
            let agree = f64::from(own) * acc[b] > 0.0;
            count[b] > 1e-12 && acc[b].abs() >= need - 1e-12 && agree
        })
        .map(|b| {
            let theta = params.bin_center(b);
            let map = select_directional_map(theta);
            DirectionEntry {
                theta,
                grad: maps.grad(map, x, y),
                strength: acc[b],
                map,
                live: true,
            }
        })
        .collect()
}

/// Prominent directions of one edge point.
pub fn prominent_directions(
    maps: &DirectionalEdgeMaps,
    seed: Pixel,
    params: &HistogramParams,
) -> Result<ProminentDirectionSet> {
    params.validate()?;
    if !maps.contains(seed) || !maps.is_edge_point(seed.x as usize, seed.y as usize) {
        return Err(Error::argument(format!(
            "pixel ({}, {}) is not an edge point",
            seed.x, seed.y
        )));
    }
    let (acc, count) = orientation_histogram(maps, seed, params);
    Ok(ProminentDirectionSet {
        seed,
        bins: params.bins,
        entries: entries_from_histogram(maps, seed, params, &acc, &count),
    })
}

/// Prominent-direction sets of every pixel (empty for non-edge points),
/// stored contiguously. Retirement flags are the only mutable part.
#[derive(Debug, Clone)]
pub struct DirectionStore {
    width: usize,
    height: usize,
    params: HistogramParams,
    offsets: Vec<u32>,
    entries: Vec<DirectionEntry>,
}

impl DirectionStore {
    pub fn build(maps: &DirectionalEdgeMaps, params: &HistogramParams) -> Result<Self> {
        params.validate()?;
        let (w, h) = (maps.width(), maps.height());
        let window = params.window();
        let rows: Vec<Vec<Vec<DirectionEntry>>> = (0..h)
            .into_par_iter()
            .map(|y| {
                (0..w)
                    .map(|x| {
                        if !maps.is_edge_point(x, y) {
                            return Vec::new();
                        }
                        let seed = Pixel::new(x as i64, y as i64);
                        let (acc, count) = histogram_with_window(maps, seed, params, &window);
                        entries_from_histogram(maps, seed, params, &acc, &count)
                    })
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(w * h + 1);
        let mut entries = Vec::new();
        offsets.push(0);
        for row in rows {
            for cell in row {
                entries.extend(cell);
                offsets.push(entries.len() as u32);
            }
        }
        Ok(Self {
            width: w,
            height: h,
            params: *params,
            offsets,
            entries,
        })
    }

    /// Store from explicit per-pixel sets (used by tests and the FFI layer).
    pub fn from_sets(
        width: usize,
        height: usize,
        params: HistogramParams,
        sets: impl IntoIterator<Item = (Pixel, Vec<DirectionEntry>)>,
    ) -> Self {
        let mut per: Vec<Vec<DirectionEntry>> = vec![Vec::new(); width * height];
        for (p, e) in sets {
            per[p.y as usize * width + p.x as usize] = e;
        }
        let mut offsets = vec![0u32];
        let mut entries = Vec::new();
        for cell in per {
            entries.extend(cell);
            offsets.push(entries.len() as u32);
        }
        Self {
            width,
            height,
            params,
            offsets,
            entries,
        }
    }

    pub fn params(&self) -> &HistogramParams {
        &self.params
    }

    pub fn tolerance(&self) -> f64 {
        self.params.tolerance()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn range(&self, p: Pixel) -> Option<std::ops::Range<usize>> {
        if p.x < 0 || p.y < 0 || p.x as usize >= self.width || p.y as usize >= self.height {
            return None;
        }
        let i = p.y as usize * self.width + p.x as usize;
        Some(self.offsets[i] as usize..self.offsets[i + 1] as usize)
    }

    pub fn entries(&self, p: Pixel) -> &[DirectionEntry] {
        match self.range(p) {
            Some(r) => &self.entries[r],
            None => &[],
        }
    }

    pub fn entries_mut(&mut self, p: Pixel) -> &mut [DirectionEntry] {
        match self.range(p) {
            Some(r) => &mut self.entries[r],
            None => &mut [],
        }
    }

    pub fn set(&self, p: Pixel) -> ProminentDirectionSet {
        ProminentDirectionSet {
            seed: p,
            bins: self.params.bins,
            entries: self.entries(p).to_vec(),
        }
    }

    /// Candidate-match test: does `p` hold a live direction compatible with
    /// `line_deg` and with the seed's transition polarity?
    pub fn is_candidate(&self, p: Pixel, line_deg: f64, seed_polarity: i8) -> bool {
        let tol = self.tolerance();
        self.entries(p)
            .iter()
            .any(|e| e.matches(line_deg, tol, seed_polarity))
    }

    /// Retire every live entry of `p` with the seed's polarity whose bin lies
    /// within `window` degrees of the line; returns how many.
    pub fn retire_near(
        &mut self,
        p: Pixel,
        line_deg: f64,
        window: f64,
        seed_polarity: i8,
    ) -> usize {
        let mut n = 0;
        for e in self.entries_mut(p) {
            if e.live
                && orientation_diff(e.theta, line_deg) <= window + 1e-9
                && e.polarity(line_deg) == seed_polarity
            {
                e.live = false;
                n += 1;
            }
        }
        n
    }

    /// Pixels that have at least one entry, row-major.
    pub fn seeds(&self) -> impl Iterator<Item = Pixel> + '_ {
        (0..self.width * self.height)
            .filter(|&i| self.offsets[i + 1] > self.offsets[i])
            .map(|i| Pixel::new((i % self.width) as i64, (i / self.width) as i64))
    }

    pub fn total_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn live_entries(&self) -> usize {
        self.entries.iter().filter(|e| e.live).count()
    }
}
