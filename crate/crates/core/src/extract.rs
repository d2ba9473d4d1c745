//! The STRAIGHT pipeline: per-seed length maps, peak extraction, endpoint
//! recovery and direction retirement.

use serde::Serialize;

use crate::directions::{DirectionStore, HistogramParams};
use crate::edges::edge_maps;
use crate::error::Result;
use crate::fit::weighted_tls;
use crate::geom::{
    chebyshev_unit, normal, orientation_diff, point_segment_distance, wrap180, Pixel,
};
use crate::image::Image;
use crate::length_map::{fill_pair, seed_polarity, FillStats, HalfPlane, MapPair, MapParams};
use crate::nms::non_maxima_suppression;
use crate::overlay::Endpoints;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtractParams {
    /// Edge threshold `T`.
    pub threshold: f64,
    pub histogram: HistogramParams,
    pub map: MapParams,
    /// Smallest accepted `L₊ + L₋`.
    pub min_length: u32,
    /// Non-maxima suppression radius in cells.
    pub nms_radius: usize,
    /// Minimum ratio of supported equidistances to length.
    pub support_fraction: f64,
    /// Entries of support pixels within this many half-bins of an extracted
    /// line are retired.
    pub retire_half_bins: f64,
}

impl Default for ExtractParams {
    fn default() -> Self {
        Self {
            threshold: 15.0,
            histogram: HistogramParams::default(),
            map: MapParams::default(),
            min_length: 10,
            nms_radius: 2,
            support_fraction: 0.75,
            retire_half_bins: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineSegment {
    pub p_minus: Pixel,
    pub p_plus: Pixel,
    pub dp: f64,
    pub dtheta: f64,
    pub seed: Pixel,
    pub theta_n: f64,
    pub length: u32,
    pub support: usize,
    #[serde(skip)]
    pub support_pixels: Vec<Pixel>,
}

impl LineSegment {
    /// Orientation of the refined line in `[0°, 180°)`.
    pub fn theta_deg(&self) -> f64 {
        wrap180(self.theta_n + self.dtheta)
    }
}

impl Endpoints for LineSegment {
    fn endpoints(&self) -> (Pixel, Pixel) {
        (self.p_minus, self.p_plus)
    }
}

/// Line hypothesis relative to a seed.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Hypothesis {
    seed: Pixel,
    theta_n: f64,
    dp: f64,
    dtheta: f64,
}

impl Hypothesis {
    fn angle(&self) -> f64 {
        self.theta_n + self.dtheta
    }

    /// `round(p₀ ± E·v/‖v‖∞ + δp·v⊥)` clamped to the image.
    fn endpoint(&self, e: f64, width: usize, height: usize) -> Pixel {
        let (ux, uy) = chebyshev_unit(self.angle());
        let (nx, ny) = normal(self.angle());
        let x = (self.seed.x as f64 + e * ux + self.dp * nx).round() as i64;
        let y = (self.seed.y as f64 + e * uy + self.dp * ny).round() as i64;
        Pixel::new(x.clamp(0, width as i64 - 1), y.clamp(0, height as i64 - 1))
    }

    fn endpoints(&self, e_plus: u32, e_minus: u32, width: usize, height: usize) -> (Pixel, Pixel) {
        (
            self.endpoint(-(e_minus as f64), width, height),
            self.endpoint(e_plus as f64, width, height),
        )
    }
}

/// Candidate matches within `radius` of the closed segment `[a, b]`, with
/// the gradient magnitude of their best matching entry.
fn matches_near(
    store: &DirectionStore,
    a: Pixel,
    b: Pixel,
    radius: f64,
    line_deg: f64,
    polarity: i8,
) -> Vec<(Pixel, f64)> {
    let tol = store.tolerance();
    let r = radius.ceil() as i64;
    let (x0, x1) = (a.x.min(b.x) - r, a.x.max(b.x) + r);
    let (y0, y1) = (a.y.min(b.y) - r, a.y.max(b.y) + r);
    let mut out = Vec::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let p = Pixel::new(x, y);
            if point_segment_distance(p.to_f64(), a.to_f64(), b.to_f64()) > radius + 1e-9 {
                continue;
            }
            let w = store
                .entries(p)
                .iter()
                .filter(|e| e.matches(line_deg, tol, polarity))
                .map(|e| e.grad.abs())
                .fold(None, |m: Option<f64>, g| Some(m.map_or(g, |m| m.max(g))));
            if let Some(w) = w {
                out.push((p, w));
            }
        }
    }
    out
}

/// Number of distinct signed equidistances from the seed holding at least
/// one match, so a band two pixels wide cannot double a sparse chain.
fn supported_rings(seed: Pixel, theta_n: f64, matches: &[(Pixel, f64)]) -> usize {
    let mut rings: Vec<i64> = matches
        .iter()
        .map(|(p, _)| {
            let (dx, dy) = (p.x - seed.x, p.y - seed.y);
            let e = dx.abs().max(dy.abs());
            match HalfPlane::of(dx, dy, theta_n) {
                HalfPlane::Plus => e,
                HalfPlane::Minus => -e,
            }
        })
        .collect();
    rings.sort_unstable();
    rings.dedup();
    rings.len()
}

/// Weighted line fit of the matches, as `(δp, δθ)` relative to `(seed, θ_n)`.
/// `None` when the matches have no spread.
pub fn refine_parameters(
    seed: Pixel,
    theta_n: f64,
    matches: &[(Pixel, f64)],
) -> Option<(f64, f64)> {
    if matches.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64, f64)> = matches
        .iter()
        .map(|(p, w)| ((p.x - seed.x) as f64, (p.y - seed.y) as f64, *w))
        .collect();
    let fit = weighted_tls(&pts)?;
    let mut dtheta = wrap180(fit.angle_deg - theta_n);
    if dtheta >= 90.0 {
        dtheta -= 180.0;
    }
    let (nx, ny) = normal(theta_n + dtheta);
    Some((fit.cx * nx + fit.cy * ny, dtheta))
}

/// Extract the segments of one `(seed, θ_n)` from its filled map pairs,
/// retiring the directions of their support.
pub fn extract_at(
    seed: Pixel,
    theta_n: f64,
    pairs: &[MapPair],
    store: &mut DirectionStore,
    params: &ExtractParams,
) -> Vec<LineSegment> {
    let tol = store.tolerance();
    let radius = params.map.uncertainty_radius;
    let (w, h) = (store.width(), store.height());
    let polarity = seed_polarity(store, seed, theta_n, theta_n);
    let mut peaks = Vec::new();
    for (k, pair) in pairs.iter().enumerate() {
        let g = pair.grid();
        for (i, j, v) in
            non_maxima_suppression(&pair.sum(), g, params.nms_radius, params.min_length.max(1))
        {
            peaks.push((v, k, i, j));
        }
    }
    peaks.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then((a.3, a.2).cmp(&(b.3, b.2)))
    });

    let mut out = Vec::new();
    for (_, k, i, j) in peaks {
        let pair = &pairs[k];
        let g = pair.grid();
        let (dp_c, dt_c) = pair.plus.cell_params(i, j);
        let half_cell = 0.5 * pair.plus.dt.width() / g as f64;
        if dt_c - half_cell > tol || dt_c + half_cell < -tol {
            continue;
        }
        let (e_plus, e_minus) = (pair.plus.get(i, j), pair.minus.get(i, j));
        let coarse = Hypothesis {
            seed,
            theta_n,
            dp: dp_c,
            dtheta: dt_c,
        };
        let (a, b) = coarse.endpoints(e_plus, e_minus, w, h);
        let matches = matches_near(store, a, b, radius, theta_n, polarity);
        let refined = match refine_parameters(seed, theta_n, &matches) {
            Some((dp, dtheta)) => Hypothesis {
                seed,
                theta_n,
                dp,
                dtheta,
            },
            None => coarse,
        };
        if refined.dtheta.abs() > tol + 1e-9 {
            continue;
        }
        let (a, b) = refined.endpoints(e_plus, e_minus, w, h);
        let support = matches_near(store, a, b, radius, theta_n, polarity);
        let length = e_plus + e_minus;
        let rings = supported_rings(seed, theta_n, &support);
        if length < params.min_length || (rings as f64) < params.support_fraction * length as f64 {
            continue;
        }
        let window = params.retire_half_bins * tol;
        for (p, _) in &support {
            store.retire_near(*p, refined.angle(), window, polarity);
        }
        out.push(LineSegment {
            p_minus: a,
            p_plus: b,
            dp: refined.dp,
            dtheta: refined.dtheta,
            seed,
            theta_n,
            length,
            support: support.len(),
            support_pixels: support.into_iter().map(|m| m.0).collect(),
        });
    }
    out
}

/// Segments plus search statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Extraction {
    pub segments: Vec<LineSegment>,
    pub stats: FillStats,
    pub seeds: usize,
    pub maps: usize,
}

/// Seeds in processing order: descending strongest histogram magnitude,
/// ties row-major.
pub fn seed_order(store: &DirectionStore) -> Vec<Pixel> {
    let mut seeds: Vec<(f64, Pixel)> = store
        .seeds()
        .map(|p| {
            let s = store
                .entries(p)
                .iter()
                .map(|e| e.strength.abs())
                .fold(0.0, f64::max);
            (s, p)
        })
        .collect();
    // stable sort keeps the row-major order of ties
    seeds.sort_by(|a, b| b.0.total_cmp(&a.0));
    seeds.into_iter().map(|s| s.1).collect()
}

/// Run the pipeline over a prepared direction store.
pub fn extract_from_store(store: &mut DirectionStore, params: &ExtractParams) -> Extraction {
    let mut result = Extraction::default();
    for seed in seed_order(store) {
        result.seeds += 1;
        // strongest direction first, like the seeds themselves
        let mut order: Vec<usize> = (0..store.entries(seed).len()).collect();
        order.sort_by(|&a, &b| {
            let (ea, eb) = (store.entries(seed)[a], store.entries(seed)[b]);
            eb.strength
                .abs()
                .total_cmp(&ea.strength.abs())
                .then(a.cmp(&b))
        });
        for k in order {
            let entry = store.entries(seed)[k];
            if !entry.live {
                continue;
            }
            let (pairs, stats) = fill_pair(seed, entry.theta, store, &params.map);
            result.stats += stats;
            result.maps += pairs.len();
            let segs = extract_at(seed, entry.theta, &pairs, store, params);
            result.segments.extend(segs);
        }
    }
    result
}

pub fn extract_with_stats(image: &Image, params: &ExtractParams) -> Result<Extraction> {
    params.map.validate()?;
    let maps = edge_maps(image, params.threshold)?;
    let mut store = DirectionStore::build(&maps, &params.histogram)?;
    Ok(extract_from_store(&mut store, params))
}

pub fn extract_all(image: &Image, params: &ExtractParams) -> Result<Vec<LineSegment>> {
    Ok(extract_with_stats(image, params)?.segments)
}

/// Whether two orientations agree within `tol` degrees.
pub fn same_orientation(a: f64, b: f64, tol: f64) -> bool {
    orientation_diff(a, b) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::DirectionEntry;
    use crate::edges::select_directional_map;
    use crate::length_map::{HalfPlane, LengthMap, Span};

    fn entry(theta: f64, grad: f64) -> DirectionEntry {
        DirectionEntry {
            theta,
            grad,
            strength: 5.0,
            map: select_directional_map(theta),
            live: true,
        }
    }

    #[test]
    fn blank_image_is_empty() {
        let img = Image::filled(40, 30, 80.0);
        assert!(extract_all(&img, &ExtractParams::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn zero_maps_give_nothing() {
        let seed = Pixel::new(5, 5);
        let mut store = DirectionStore::from_sets(
            11,
            11,
            HistogramParams::default(),
            vec![(seed, vec![entry(90.0, 40.0)])],
        );
        let (dp, dt) = MapParams::default().initial_spans(store.tolerance());
        let pair = MapPair {
            plus: LengthMap::new(seed, 90.0, HalfPlane::Plus, 21, dp, dt),
            minus: LengthMap::new(seed, 90.0, HalfPlane::Minus, 21, dp, dt),
        };
        assert!(extract_at(seed, 90.0, &[pair], &mut store, &ExtractParams::default()).is_empty());
    }

    fn column_store(seed: Pixel, from: i64, to: i64, theta: f64) -> DirectionStore {
        let sets = (from..=to).map(|y| (Pixel::new(seed.x, y), vec![entry(theta, 40.0)]));
        DirectionStore::from_sets(101, 101, HistogramParams::default(), sets)
    }

    fn peak_pair(seed: Pixel, theta_n: f64, e_plus: u32, e_minus: u32, dt_cell: usize) -> MapPair {
        let (dp, dt) = MapParams::default().initial_spans(90.0 / 32.0);
        let mut plus = LengthMap::new(seed, theta_n, HalfPlane::Plus, 21, dp, dt);
        let mut minus = LengthMap::new(seed, theta_n, HalfPlane::Minus, 21, dp, dt);
        plus.cells[dt_cell * 21 + 10] = e_plus;
        minus.cells[dt_cell * 21 + 10] = e_minus;
        MapPair { plus, minus }
    }

    #[test]
    fn endpoints_from_extremes() {
        let seed = Pixel::new(50, 50);
        let mut store = column_store(seed, 34, 64, 90.0);
        let pair = peak_pair(seed, 90.0, 14, 16, 10);
        let segs = extract_at(seed, 90.0, &[pair], &mut store, &ExtractParams::default());
        assert_eq!(segs.len(), 1);
        let s = &segs[0];
        assert_eq!(
            (s.p_plus, s.p_minus),
            (Pixel::new(50, 64), Pixel::new(50, 34))
        );
        assert_eq!(s.length, 30);
        assert_eq!(s.support, 31);
        // every support pixel got retired
        assert_eq!(store.live_entries(), 0);
    }

    #[test]
    fn guard_zone_peak_is_consumed() {
        let seed = Pixel::new(50, 50);
        let mut store = column_store(seed, 34, 64, 90.0);
        // top row of the δθ axis sits in the guard band
        let pair = peak_pair(seed, 90.0, 14, 16, 20);
        assert!(pair.plus.cell_params(10, 20).1 > 90.0 / 32.0 + 0.5);
        let segs = extract_at(seed, 90.0, &[pair], &mut store, &ExtractParams::default());
        assert!(segs.is_empty());
        assert_eq!(store.live_entries(), 31);
    }

    #[test]
    fn refinement_recovers_line() {
        let seed = Pixel::new(0, 0);
        let m: Vec<_> = (0..20)
            .map(|i| (Pixel::new(i, 3), 1.0 + i as f64))
            .collect();
        let (dp, dt) = refine_parameters(seed, 2.0, &m).unwrap();
        assert!((dt + 2.0).abs() < 1e-9);
        // line y = 3 has δp = ⟨(0,3), (0,−1)⟩ = −3
        assert!((dp + 3.0).abs() < 1e-9);
        assert!(refine_parameters(seed, 0.0, &m[..1]).is_none());
    }

    #[test]
    fn span_sanity() {
        let s = Span::new(-1.0, 1.0);
        assert_eq!(s.mid(), 0.0);
    }
}
