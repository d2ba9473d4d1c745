//! Shared helpers for integration tests: a brute-force length oracle and
//! small random scenes.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use straight::directions::DirectionStore;
use straight::extract::LineSegment;
use straight::geom::orientation_diff;
use straight::geom::Pixel;
use straight::image::Image;
use straight::length_map::{seed_polarity, HalfPlane, MapParams};
use straight::synth::{line_pixels, TruthSegment};

/// Per-cell connected reach, computed independently for every `(δp_i, δθ_j)`
/// by walking all pixels at each Chebyshev distance. Row-major by δθ.
pub fn oracle_length_map(
    store: &DirectionStore,
    seed: Pixel,
    theta_n: f64,
    half: HalfPlane,
    params: &MapParams,
) -> Vec<u32> {
    let t = store.tolerance() + params.guard_deg;
    let r = params.position_range;
    oracle_length_map_in(store, seed, theta_n, half, params, (-r, r), (-t, t))
}

/// Oracle over explicit `(lo, hi)` spans of δp and δθ.
pub fn oracle_length_map_in(
    store: &DirectionStore,
    seed: Pixel,
    theta_n: f64,
    half: HalfPlane,
    params: &MapParams,
    (dp_lo, dp_hi): (f64, f64),
    (dt_lo, dt_hi): (f64, f64),
) -> Vec<u32> {
    let g = params.grid;
    let center = |lo: f64, hi: f64, i: usize| lo + (i as f64 + 0.5) * (hi - lo) / g as f64;
    let line = theta_n;
    let pol = seed_polarity(store, seed, theta_n, line);
    let (vc, vs) = (theta_n.to_radians().cos(), theta_n.to_radians().sin());
    let max_e = (store.width().max(store.height()) as i64) + params.max_gap + 2;

    // candidate matches per ring, independent of the cell
    let rings: Vec<Vec<(f64, f64)>> = (0..=max_e)
        .map(|e| {
            let mut hits = Vec::new();
            if e == 0 {
                return hits;
            }
            for dy in -e..=e {
                for dx in -e..=e {
                    if dx.abs().max(dy.abs()) != e {
                        continue;
                    }
                    let side = if dx as f64 * vc + dy as f64 * vs >= 0.0 {
                        HalfPlane::Plus
                    } else {
                        HalfPlane::Minus
                    };
                    if side != half {
                        continue;
                    }
                    if store.is_candidate(seed.offset(dx, dy), line, pol) {
                        hits.push((dx as f64, dy as f64));
                    }
                }
            }
            hits
        })
        .collect();

    let mut out = vec![0u32; g * g];
    for j in 0..g {
        let a = (theta_n + center(dt_lo, dt_hi, j)).to_radians();
        let (s, c) = (a.sin(), a.cos());
        for i in 0..g {
            let p = center(dp_lo, dp_hi, i);
            let mut reach = 0i64;
            for e in 1..=max_e {
                if e - reach > params.max_gap + 1 {
                    break;
                }
                let hit = rings[e as usize].iter().any(|&(qx, qy)| {
                    let f = qx * s - qy * c;
                    f - params.uncertainty_radius <= p && p <= f + params.uncertainty_radius
                });
                if hit {
                    reach = e;
                }
            }
            out[j * g + i] = reach as u32;
        }
    }
    out
}

/// Random piecewise-constant scene with a few rectangles and thin lines.
pub fn random_scene(size: usize, rng_seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut img = Image::filled(size, size, rng.random_range(40.0..90.0));
    for _ in 0..rng.random_range(1..4) {
        let (x0, y0) = (rng.random_range(0..size - 4), rng.random_range(0..size - 4));
        let (x1, y1) = (
            rng.random_range(x0 + 3..size),
            rng.random_range(y0 + 3..size),
        );
        let v = rng.random_range(120.0..230.0);
        for y in y0..y1 {
            for x in x0..x1 {
                img.set(x, y, v);
            }
        }
    }
    for _ in 0..rng.random_range(0..3) {
        let (x0, y0) = (
            rng.random_range(0.0..size as f64),
            rng.random_range(0.0..size as f64),
        );
        let (x1, y1) = (
            rng.random_range(0.0..size as f64),
            rng.random_range(0.0..size as f64),
        );
        let v = rng.random_range(0.0..255.0);
        let n = ((x1 - x0).abs().max((y1 - y0).abs()).ceil() as usize).max(1);
        for k in 0..=n {
            let t = k as f64 / n as f64;
            let (x, y) = ((x0 + t * (x1 - x0)).round(), (y0 + t * (y1 - y0)).round());
            if x >= 0.0 && y >= 0.0 && (x as usize) < size && (y as usize) < size {
                img.set(x as usize, y as usize, v);
            }
        }
    }
    img
}

/// Whether a detected `(ρ, θ)` lies within one bin of the truth segment:
/// `θ` within one θ bin (modulo 180°), and the detected line within one ρ
/// bin of the segment midpoint. Measuring ρ at the midpoint rather than at
/// the image origin keeps a sub-bin rotation of a long line from reading
/// as a large ρ offset.
pub fn peak_matches(
    truth: &TruthSegment,
    rho: f64,
    theta: f64,
    rho_step: f64,
    theta_step: f64,
) -> bool {
    let (_, tt) = truth.rho_theta();
    let dt = (theta - tt).rem_euclid(180.0);
    if dt.min(180.0 - dt) > theta_step + 1e-9 {
        return false;
    }
    let (mx, my) = (0.5 * (truth.x1 + truth.x2), 0.5 * (truth.y1 + truth.y2));
    let a = theta.to_radians();
    (mx * a.cos() + my * a.sin() - rho).abs() <= rho_step + 1e-9
}

/// Greedy one-to-one assignment of truths to detected lines.
pub fn matched_peaks(
    truth: &[TruthSegment],
    lines: &[(f64, f64)],
    rho_step: f64,
    theta_step: f64,
) -> usize {
    let mut used = vec![false; lines.len()];
    let mut n = 0;
    for t in truth {
        if let Some(k) = (0..lines.len())
            .find(|&k| !used[k] && peak_matches(t, lines[k].0, lines[k].1, rho_step, theta_step))
        {
            used[k] = true;
            n += 1;
        }
    }
    n
}

pub const LEN: i64 = 100;

/// Start of a line of `LEN + 1` pixels centred in a 180×180 image.
pub fn start(angle: f64) -> (i64, i64) {
    let a = angle.to_radians();
    let m = a.cos().abs().max(a.sin().abs());
    let half = 0.5 * LEN as f64 / m;
    (
        (90.0 - half * a.cos()).round() as i64,
        (90.0 - half * a.sin()).round() as i64,
    )
}

/// Bright line with one gap of `gap` missing pixels in the middle.
pub fn gapped_line(angle: f64, gap: i64) -> Image {
    let mut img = Image::filled(180, 180, 0.0);
    let (x0, y0) = start(angle);
    for (x, y) in line_pixels(x0, y0, angle, LEN, &[(LEN / 2, gap)]) {
        img.set(x as usize, y as usize, 255.0);
    }
    img
}

/// Segments along the rendered line, split by the side of the centreline
/// they lie on.
pub fn per_side(segs: &[LineSegment], angle: f64) -> [usize; 2] {
    let a = angle.to_radians();
    let (nx, ny) = (-a.sin(), a.cos());
    let mut count = [0, 0];
    for s in segs {
        if orientation_diff(s.theta_deg(), angle) > 3.0 || s.length < 10 {
            continue;
        }
        let (x0, y0) = start(angle);
        let off = |x: i64, y: i64| (x - x0) as f64 * nx + (y - y0) as f64 * ny;
        let o = 0.5 * (off(s.p_minus.x, s.p_minus.y) + off(s.p_plus.x, s.p_plus.y));
        if o.abs() <= 3.0 {
            count[usize::from(o > 0.0)] += 1;
        }
    }
    count
}
