//! Length maps: per-(seed, direction, half-plane) grids over the line
//! parameters `(δp, δθ)` holding the connected length reached by each
//! hypothesis.
//!
//! A map is filled by scanning Chebyshev rings of growing radius `e` around
//! the seed. Each candidate match on a ring writes `e` into the cells of its
//! update region, except where more than `d` rings have passed without a
//! match for that cell (a gap of `d` missing pixels is bridged, `d + 1` is
//! not). Optionally the grid is zoomed onto the bounding boxes of
//! the cells that can still grow, splitting into several maps when the
//! updatable cells form disconnected groups.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;

use crate::directions::DirectionStore;
use crate::error::{Error, Result};
use crate::geom::{chebyshev_unit, direction, normal, Pixel};

/// Which side of the line through the seed orthogonal to `θ_n` is scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HalfPlane {
    Plus,
    Minus,
}

impl HalfPlane {
    pub fn sign(self) -> f64 {
        match self {
            HalfPlane::Plus => 1.0,
            HalfPlane::Minus => -1.0,
        }
    }

    /// Half-plane of an offset from the seed; ties go to `Plus`.
    pub fn of(dx: i64, dy: i64, theta_n: f64) -> HalfPlane {
        let (c, s) = direction(theta_n);
        if dx as f64 * c + dy as f64 * s >= 0.0 {
            HalfPlane::Plus
        } else {
            HalfPlane::Minus
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HalfPlane::Plus => "plus",
            HalfPlane::Minus => "minus",
        }
    }
}

/// Closed parameter interval sampled by `G` equal cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn center(&self, i: usize, g: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * (self.hi - self.lo) / g as f64
    }

    /// Cell whose extent contains `v`, clamped to the grid.
    pub fn cell_of(&self, v: f64, g: usize) -> usize {
        let t = ((v - self.lo) / (self.hi - self.lo) * g as f64).floor();
        t.clamp(0.0, (g - 1) as f64) as usize
    }

    /// Sub-span covering cells `i0..=i1`.
    pub fn sub(&self, i0: usize, i1: usize, g: usize) -> Span {
        let w = self.width() / g as f64;
        Span::new(self.lo + i0 as f64 * w, self.lo + (i1 + 1) as f64 * w)
    }

    /// Index range of cells whose centre lies in `[a, b]`.
    pub fn cells_in(&self, a: f64, b: f64, g: usize) -> Option<(usize, usize)> {
        if b < a {
            return None;
        }
        let w = (self.hi - self.lo) / g as f64;
        let mut i0 = (((a - self.lo) / w) - 0.5).ceil().max(0.0) as usize;
        let est_hi = (((b - self.lo) / w) - 0.5).floor();
        if est_hi < 0.0 {
            return None;
        }
        let mut i1 = (est_hi as usize).min(g - 1);
        // settle floating-point ties against the exact centre formula
        while i0 > 0 && self.center(i0 - 1, g) >= a {
            i0 -= 1;
        }
        while i0 < g && self.center(i0, g) < a {
            i0 += 1;
        }
        while i1 + 1 < g && self.center(i1 + 1, g) <= b {
            i1 += 1;
        }
        while i1 > 0 && self.center(i1, g) > b {
            i1 -= 1;
        }
        if i0 >= g || i0 > i1 || self.center(i1, g) > b || self.center(i0, g) < a {
            return None;
        }
        Some((i0, i1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapParams {
    /// Cells per axis (`G`).
    pub grid: usize,
    /// Maximum number `d` of missing rings between consecutive matches.
    pub max_gap: i64,
    /// Uncertainty-ball radius `R`.
    pub uncertainty_radius: f64,
    /// Position half-range `Δp`.
    pub position_range: f64,
    /// Extra orientation half-range beyond `Δθ`, degrees.
    pub guard_deg: f64,
    /// Hierarchical zoom on/off.
    pub zoom: bool,
}

impl Default for MapParams {
    fn default() -> Self {
        Self {
            grid: 21,
            max_gap: 2,
            uncertainty_radius: 1.0,
            position_range: 1.0,
            guard_deg: 2.0,
            zoom: true,
        }
    }
}

impl MapParams {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 1 {
            return Err(Error::argument(
                "length map grid must have at least one cell",
            ));
        }
        if self.max_gap < 1 {
            return Err(Error::argument("maximum gap d must be at least 1"));
        }
        if !(self.uncertainty_radius > 0.0) {
            return Err(Error::argument("uncertainty radius must be positive"));
        }
        if !(self.position_range > 0.0) {
            return Err(Error::argument("position range must be positive"));
        }
        if !(self.guard_deg >= 0.0) {
            return Err(Error::argument("guard angle must be non-negative"));
        }
        Ok(())
    }

    /// Largest step `e − L` between consecutive matches of one cell.
    pub fn max_step(&self) -> i64 {
        self.max_gap + 1
    }

    pub fn initial_spans(&self, tolerance: f64) -> (Span, Span) {
        let t = tolerance + self.guard_deg;
        (
            Span::new(-self.position_range, self.position_range),
            Span::new(-t, t),
        )
    }
}

/// The parameter window a map currently samples, plus cached trigonometry.
#[derive(Debug, Clone)]
pub struct Window {
    pub theta_n: f64,
    pub grid: usize,
    pub dp: Span,
    pub dt: Span,
    dp_centers: Vec<f64>,
    sin_cos: Vec<(f64, f64)>,
}

impl Window {
    pub fn new(theta_n: f64, grid: usize, dp: Span, dt: Span) -> Self {
        let dp_centers = (0..grid).map(|i| dp.center(i, grid)).collect();
        let sin_cos = (0..grid)
            .map(|j| {
                let a = (theta_n + dt.center(j, grid)).to_radians();
                (a.sin(), a.cos())
            })
            .collect();
        Self {
            theta_n,
            grid,
            dp,
            dt,
            dp_centers,
            sin_cos,
        }
    }

    /// Orientation of the central hypothesis.
    pub fn central_angle(&self) -> f64 {
        self.theta_n + self.dt.mid()
    }

    #[inline]
    fn offset(&self, j: usize, qx: f64, qy: f64) -> f64 {
        let (s, c) = self.sin_cos[j];
        qx * s - qy * c
    }

    /// Update region of a pixel at offset `(qx, qy)` from the seed.
    pub fn region(&self, qx: f64, qy: f64, radius: f64) -> UpdateRegion {
        let g = self.grid;
        let mut columns = Vec::with_capacity(g);
        let mut bounds = Vec::with_capacity(g);
        for j in 0..g {
            let f = self.offset(j, qx, qy);
            bounds.push((f - radius, f + radius));
            columns.push(self.dp.cells_in(f - radius, f + radius, g));
        }
        UpdateRegion {
            radius,
            bounds,
            columns,
        }
    }

    /// Whether the pixel's update region is non-empty.
    fn in_range(&self, qx: f64, qy: f64, radius: f64) -> bool {
        let g = self.grid;
        (0..g).any(|j| {
            let f = self.offset(j, qx, qy);
            self.dp.cells_in(f - radius, f + radius, g).is_some()
        })
    }

    /// Hull of the positions `t` along a ring side `(sx, sy) + t·(ux, uy)`
    /// where some column's offset can reach the window. Every in-range
    /// pixel of the side lies inside it.
    fn side_hull(&self, start: (f64, f64), dir: (f64, f64), radius: f64) -> Option<(f64, f64)> {
        let g = self.grid;
        let lo_f = self.dp_centers[0] - radius;
        let hi_f = self.dp_centers[g - 1] + radius;
        let mut hull: Option<(f64, f64)> = None;
        for j in 0..g {
            let a = self.offset(j, start.0, start.1);
            let b = self.offset(j, dir.0, dir.1);
            let iv = if b.abs() < 1e-12 {
                (lo_f - 1e-9..=hi_f + 1e-9)
                    .contains(&a)
                    .then_some((f64::NEG_INFINITY, f64::INFINITY))
            } else {
                let (t1, t2) = ((lo_f - a) / b, (hi_f - a) / b);
                Some((t1.min(t2) - 1e-6, t1.max(t2) + 1e-6))
            };
            if let Some((l, h)) = iv {
                hull = Some(match hull {
                    None => (l, h),
                    Some((hl, hh)) => (hl.min(l), hh.max(h)),
                });
            }
        }
        hull
    }
}

/// Per-δθ-sample intervals of δp crossing a pixel's uncertainty ball.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRegion {
    pub radius: f64,
    /// Unclipped `[δp⁻(δθ_j), δp⁺(δθ_j)]` for every column `j`.
    pub bounds: Vec<(f64, f64)>,
    /// Cells `i0..=i1` of column `j` whose δp centre lies in the clipped interval.
    pub columns: Vec<Option<(usize, usize)>>,
}

impl UpdateRegion {
    pub fn is_empty(&self) -> bool {
        self.columns.iter().all(Option::is_none)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        matches!(self.columns[j], Some((a, b)) if a <= i && i <= b)
    }

    pub fn cell_count(&self) -> usize {
        self.columns.iter().flatten().map(|(a, b)| b - a + 1).sum()
    }
}

/// Update region of pixel `p` in the map of `(seed, θ_n)` over the given window.
pub fn update_region(
    seed: Pixel,
    theta_n: f64,
    p: Pixel,
    radius: f64,
    dp: Span,
    dt: Span,
    grid: usize,
) -> UpdateRegion {
    let w = Window::new(theta_n, grid, dp, dt);
    w.region((p.x - seed.x) as f64, (p.y - seed.y) as f64, radius)
}

fn ring_index(e: i64, dx: i64, dy: i64) -> i64 {
    let s = 2 * e;
    if dx == e && dy < e {
        dy + e
    } else if dy == e && dx > -e {
        s + (e - dx)
    } else if dx == -e && dy > -e {
        2 * s + (e - dy)
    } else {
        3 * s + (dx + e)
    }
}

/// Ring index of the pixel at the centre of the search range on ring `e`.
fn curve_center(window: &Window, half: HalfPlane, e: i64) -> i64 {
    let theta = window.central_angle();
    let (ux, uy) = chebyshev_unit(theta);
    let (nx, ny) = normal(theta);
    let dp = window.dp.mid();
    let sign = half.sign();
    let x = (sign * e as f64 * ux + dp * nx).round() as i64;
    let y = (sign * e as f64 * uy + dp * ny).round() as i64;
    if x.abs().max(y.abs()) == e {
        ring_index(e, x, y)
    } else {
        let x = (sign * e as f64 * ux).round() as i64;
        let y = (sign * e as f64 * uy).round() as i64;
        ring_index(e, x, y)
    }
}

/// Visit the search range of equidistant curve `e` in one half-plane.
///
/// Along each side of the Chebyshev ring the line offset of every δθ column
/// is linear, so the pixels that can reach the window form an interval that
/// is computed directly; only those pixels are tested. `visit` receives the
/// ring index and offset of each pixel with a non-empty update region.
/// Returns the number of pixels tested.
fn walk_curve(
    window: &Window,
    params: &MapParams,
    half: HalfPlane,
    e: i64,
    mut visit: impl FnMut(i64, i64, i64),
) -> usize {
    const SIDES: [((i64, i64), (i64, i64)); 4] = [
        ((1, -1), (0, 1)),
        ((1, 1), (-1, 0)),
        ((-1, 1), (0, -1)),
        ((-1, -1), (1, 0)),
    ];
    let radius = params.uncertainty_radius;
    let side_len = 2 * e;
    let mut tested = 0usize;
    for (s, &((sx, sy), (ux, uy))) in SIDES.iter().enumerate() {
        let start = ((sx * e) as f64, (sy * e) as f64);
        let Some((lo, hi)) = window.side_hull(start, (ux as f64, uy as f64), radius) else {
            continue;
        };
        let t0 = lo.ceil().max(0.0);
        let t1 = hi.floor().min((side_len - 1) as f64);
        if t1 < t0 {
            continue;
        }
        for t in t0 as i64..=t1 as i64 {
            let (dx, dy) = (sx * e + t * ux, sy * e + t * uy);
            if HalfPlane::of(dx, dy, window.theta_n) != half {
                continue;
            }
            tested += 1;
            if window.in_range(dx as f64, dy as f64, radius) {
                visit(s as i64 * side_len + t, dx, dy);
            }
        }
    }
    tested
}

/// Pixels of equidistant curve `e` with a non-empty update region, ordered
/// by ring distance from the centre of the search range.
pub fn equidistant_curve_in(
    seed: Pixel,
    window: &Window,
    params: &MapParams,
    half: HalfPlane,
    e: i64,
) -> Vec<Pixel> {
    let ring = 8 * e;
    let k0 = curve_center(window, half, e);
    let mut out = Vec::new();
    walk_curve(window, params, half, e, |k, dx, dy| {
        let fwd = (k - k0).rem_euclid(ring);
        let key = fwd.min(ring - fwd) * 2 + i64::from(fwd > ring - fwd);
        out.push((key, seed.offset(dx, dy)));
    });
    out.sort_by_key(|x| x.0);
    out.into_iter().map(|x| x.1).collect()
}

/// Pixels of equidistant curve `e` for the initial (unzoomed) window.
pub fn equidistant_curve(
    seed: Pixel,
    theta_n: f64,
    half: HalfPlane,
    e: i64,
    tolerance: f64,
    params: &MapParams,
) -> Vec<Pixel> {
    let (dp, dt) = params.initial_spans(tolerance);
    let window = Window::new(theta_n, params.grid, dp, dt);
    equidistant_curve_in(seed, &window, params, half, e)
}

/// Filled grid of one half-plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthMap {
    pub seed: Pixel,
    pub theta_n: f64,
    pub half: HalfPlane,
    pub grid: usize,
    pub dp: Span,
    pub dt: Span,
    pub zoom_depth: u32,
    /// Row-major by δθ: `cells[j * grid + i]` is `(δp_i, δθ_j)`.
    #[serde(skip)]
    pub cells: Vec<u32>,
}

impl LengthMap {
    pub fn new(
        seed: Pixel,
        theta_n: f64,
        half: HalfPlane,
        grid: usize,
        dp: Span,
        dt: Span,
    ) -> Self {
        Self {
            seed,
            theta_n,
            half,
            grid,
            dp,
            dt,
            zoom_depth: 0,
            cells: vec![0; grid * grid],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.cells[j * self.grid + i]
    }

    pub fn max(&self) -> u32 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    /// First cell (row-major) holding the maximum.
    pub fn argmax(&self) -> (usize, usize) {
        let m = self.max();
        let k = self.cells.iter().position(|&v| v == m).unwrap_or(0);
        (k % self.grid, k / self.grid)
    }

    pub fn cell_params(&self, i: usize, j: usize) -> (f64, f64) {
        (self.dp.center(i, self.grid), self.dt.center(j, self.grid))
    }

    pub fn window(&self) -> Window {
        Window::new(self.theta_n, self.grid, self.dp, self.dt)
    }

    fn apply(&mut self, region: &UpdateRegion, e: u32, max_step: u32) {
        let g = self.grid;
        for (j, col) in region.columns.iter().enumerate() {
            if let Some((i0, i1)) = *col {
                for v in &mut self.cells[j * g + i0..=j * g + i1] {
                    if e - *v <= max_step {
                        *v = e;
                    }
                }
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for j in 0..self.grid {
            let row: Vec<String> = (0..self.grid).map(|i| self.get(i, j).to_string()).collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    pub fn header_json(&self) -> serde_json::Value {
        serde_json::json!({
            "seed": [self.seed.x, self.seed.y],
            "theta_n": self.theta_n,
            "half_plane": self.half.name(),
            "grid": self.grid,
            "dp_range": [self.dp.lo, self.dp.hi],
            "dtheta_range": [self.dt.lo, self.dt.hi],
            "zoom_depth": self.zoom_depth,
            "rows": "dtheta",
            "cols": "dp",
        })
    }
}

/// Seed polarity for a direction of the seed, against the line `line_deg`.
pub fn seed_polarity(store: &DirectionStore, seed: Pixel, theta_n: f64, line_deg: f64) -> i8 {
    store
        .entries(seed)
        .iter()
        .filter(|e| (e.theta - theta_n).abs() < 1e-9)
        .map(|e| e.polarity(line_deg))
        .next()
        .unwrap_or(0)
}

/// Scan curve `e` into `map` using `window` (which must match the map's spans).
fn scan_into(
    map: &mut LengthMap,
    window: &Window,
    store: &DirectionStore,
    params: &MapParams,
    polarity: i8,
    e: i64,
) -> usize {
    // candidate intervals are tested against the seed's own direction, so
    // zooming never changes which pixels match
    let line = map.theta_n;
    let seed = map.seed;
    let half = map.half;
    let mut hits = Vec::new();
    let examined = walk_curve(window, params, half, e, |_, dx, dy| {
        let p = seed.offset(dx, dy);
        if store.is_candidate(p, line, polarity) {
            hits.push((dx, dy));
        }
    });
    for (dx, dy) in hits {
        let region = window.region(dx as f64, dy as f64, params.uncertainty_radius);
        map.apply(&region, e as u32, params.max_step() as u32);
    }
    examined
}

/// Fill one half-plane map on a fixed grid (no zoom).
pub fn fill_half_plane(
    seed: Pixel,
    theta_n: f64,
    half: HalfPlane,
    store: &DirectionStore,
    params: &MapParams,
) -> LengthMap {
    let (dp, dt) = params.initial_spans(store.tolerance());
    fill_half_plane_in(seed, theta_n, half, store, params, dp, dt)
}

/// [`fill_half_plane`] over explicit parameter spans.
pub fn fill_half_plane_in(
    seed: Pixel,
    theta_n: f64,
    half: HalfPlane,
    store: &DirectionStore,
    params: &MapParams,
    dp: Span,
    dt: Span,
) -> LengthMap {
    let mut map = LengthMap::new(seed, theta_n, half, params.grid, dp, dt);
    let window = map.window();
    let polarity = seed_polarity(store, seed, theta_n, theta_n);
    let step = params.max_step();
    let mut e = 1;
    loop {
        scan_into(&mut map, &window, store, params, polarity, e);
        e += 1;
        if e - i64::from(map.max()) > step {
            break;
        }
    }
    map
}

/// Co-registered half-plane maps sharing one parameter window.
#[derive(Debug, Clone, PartialEq)]
pub struct MapPair {
    pub plus: LengthMap,
    pub minus: LengthMap,
}

impl MapPair {
    pub fn grid(&self) -> usize {
        self.plus.grid
    }

    pub fn sum(&self) -> Vec<u32> {
        self.plus
            .cells
            .iter()
            .zip(&self.minus.cells)
            .map(|(a, b)| a + b)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FillStats {
    /// Ring pixels examined by the search-range test.
    pub scanned: u64,
    /// Zoom operations that changed a window.
    pub zooms: u64,
    /// Largest equidistance reached.
    pub max_e: i64,
}

impl std::ops::AddAssign for FillStats {
    fn add_assign(&mut self, o: Self) {
        self.scanned += o.scanned;
        self.zooms += o.zooms;
        self.max_e = self.max_e.max(o.max_e);
    }
}

/// Equidistances after which the zoom step runs: 8, 16, 32, ...
pub fn is_zoom_checkpoint(e: i64) -> bool {
    e >= 8 && (e & (e - 1)) == 0
}

struct Active {
    pair: MapPair,
    window: Window,
    done: [bool; 2],
}

/// Fill both half-plane maps of `(seed, θ_n)`, zooming hierarchically when
/// enabled. Returns one pair per surviving parameter window.
pub fn fill_pair(
    seed: Pixel,
    theta_n: f64,
    store: &DirectionStore,
    params: &MapParams,
) -> (Vec<MapPair>, FillStats) {
    let (dp, dt) = params.initial_spans(store.tolerance());
    let g = params.grid;
    let window = Window::new(theta_n, g, dp, dt);
    let polarity = seed_polarity(store, seed, theta_n, theta_n);
    let step = params.max_step();
    let mut stats = FillStats::default();
    let mut active = vec![Active {
        pair: MapPair {
            plus: LengthMap::new(seed, theta_n, HalfPlane::Plus, g, dp, dt),
            minus: LengthMap::new(seed, theta_n, HalfPlane::Minus, g, dp, dt),
        },
        window,
        done: [false, false],
    }];
    let mut finished = Vec::new();
    let mut e = 1i64;
    while !active.is_empty() {
        for a in &mut active {
            for (h, map) in [&mut a.pair.plus, &mut a.pair.minus]
                .into_iter()
                .enumerate()
            {
                if !a.done[h] {
                    stats.scanned += scan_into(map, &a.window, store, params, polarity, e) as u64;
                }
            }
        }
        stats.max_e = e;
        e += 1;
        for a in &mut active {
            for (h, map) in [&a.pair.plus, &a.pair.minus].into_iter().enumerate() {
                if e - i64::from(map.max()) > step {
                    a.done[h] = true;
                }
            }
        }
        let (done, running): (Vec<Active>, Vec<Active>) =
            active.into_iter().partition(|a| a.done[0] && a.done[1]);
        finished.extend(done.into_iter().map(|a| a.pair));
        active = running;
        if params.zoom && is_zoom_checkpoint(e - 1) {
            let mut next = Vec::with_capacity(active.len());
            for a in active {
                let threshold = (e - step).max(1) as u32;
                let children = zoom_pair(&a.pair, a.done, threshold);
                if children.len() == 1
                    && children[0].plus.dp == a.pair.plus.dp
                    && children[0].plus.dt == a.pair.plus.dt
                {
                    next.push(a);
                    continue;
                }
                stats.zooms += 1;
                for pair in children {
                    let window = pair.plus.window();
                    next.push(Active {
                        pair,
                        window,
                        done: a.done,
                    });
                }
            }
            active = next;
        }
    }
    (finished, stats)
}

/// 4-connected components of a mask, each as a list of `(i, j)` cells, in
/// row-major order of their first cell.
fn components(mask: &[bool], g: usize) -> Vec<Vec<(usize, usize)>> {
    let mut seen = vec![false; mask.len()];
    let mut out = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % g, k / g);
            comp.push((i, j));
            let mut push = |n: usize| {
                if mask[n] && !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                push(k - 1);
            }
            if i + 1 < g {
                push(k + 1);
            }
            if j > 0 {
                push(k - g);
            }
            if j + 1 < g {
                push(k + g);
            }
        }
        out.push(comp);
    }
    out
}

fn bounding_box(comp: &[(usize, usize)]) -> (usize, usize, usize, usize) {
    let i0 = comp.iter().map(|c| c.0).min().unwrap_or(0);
    let i1 = comp.iter().map(|c| c.0).max().unwrap_or(0);
    let j0 = comp.iter().map(|c| c.1).min().unwrap_or(0);
    let j1 = comp.iter().map(|c| c.1).max().unwrap_or(0);
    (i0, i1, j0, j1)
}

/// Nearest-neighbour resample of `map` onto the cell box `(i0..=i1, j0..=j1)`.
fn resample(map: &LengthMap, i0: usize, i1: usize, j0: usize, j1: usize) -> LengthMap {
    let g = map.grid;
    let dp = map.dp.sub(i0, i1, g);
    let dt = map.dt.sub(j0, j1, g);
    let mut out = LengthMap::new(map.seed, map.theta_n, map.half, g, dp, dt);
    out.zoom_depth = map.zoom_depth + 1;
    for j in 0..g {
        let sj = map.dt.cell_of(dt.center(j, g), g).clamp(j0, j1);
        for i in 0..g {
            let si = map.dp.cell_of(dp.center(i, g), g).clamp(i0, i1);
            out.cells[j * g + i] = map.get(si, sj);
        }
    }
    out
}

/// Zoom a single map onto the bounding boxes of its updatable cells
/// (`value ≥ threshold`), one output per 4-connected component.
pub fn zoom(map: &LengthMap, threshold: u32) -> Vec<LengthMap> {
    let mask: Vec<bool> = map.cells.iter().map(|&v| v >= threshold && v > 0).collect();
    components(&mask, map.grid)
        .iter()
        .map(|comp| {
            let (i0, i1, j0, j1) = bounding_box(comp);
            if (i0, i1, j0, j1) == (0, map.grid - 1, 0, map.grid - 1) {
                map.clone()
            } else {
                resample(map, i0, i1, j0, j1)
            }
        })
        .collect()
}

/// Zoom a co-registered pair using the union of updatable cells of the
/// halves that are still being filled.
fn zoom_pair(pair: &MapPair, done: [bool; 2], threshold: u32) -> Vec<MapPair> {
    let g = pair.grid();
    let mask: Vec<bool> = (0..g * g)
        .map(|k| {
            (!done[0] && pair.plus.cells[k] >= threshold)
                || (!done[1] && pair.minus.cells[k] >= threshold)
        })
        .collect();
    components(&mask, g)
        .iter()
        .map(|comp| {
            let (i0, i1, j0, j1) = bounding_box(comp);
            if (i0, i1, j0, j1) == (0, g - 1, 0, g - 1) {
                pair.clone()
            } else {
                MapPair {
                    plus: resample(&pair.plus, i0, i1, j0, j1),
                    minus: resample(&pair.minus, i0, i1, j0, j1),
                }
            }
        })
        .collect()
}
