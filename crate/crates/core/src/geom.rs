//! Small geometric helpers shared by the extraction stages.
//!
//! Angles are in degrees and measured in the image frame: x grows to the
//! right, y grows downwards, and an angle `θ` has direction `(cos θ, sin θ)`.
//! Line orientations are only defined modulo 180°.

use serde::{Deserialize, Serialize};

/// Integer pixel position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pixel {
    pub x: i64,
    pub y: i64,
}

impl Pixel {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dx: i64, dy: i64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn chebyshev(self, other: Self) -> i64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.x as f64, self.y as f64)
    }
}

/// Reduce an orientation to `[0, 180)`.
pub fn wrap180(deg: f64) -> f64 {
    let r = deg.rem_euclid(180.0);
    // rem_euclid can return exactly 180.0 for tiny negative inputs
    if r >= 180.0 {
        0.0
    } else {
        r
    }
}

/// Smallest absolute difference between two orientations, in `[0, 90]`.
pub fn orientation_diff(a: f64, b: f64) -> f64 {
    let d = wrap180(a - b);
    d.min(180.0 - d)
}

/// Unit direction `v_θ = (cos θ, sin θ)`.
pub fn direction(deg: f64) -> (f64, f64) {
    let r = deg.to_radians();
    (r.cos(), r.sin())
}

/// Unit normal `v⊥_θ = (sin θ, −cos θ)`.
pub fn normal(deg: f64) -> (f64, f64) {
    let r = deg.to_radians();
    (r.sin(), -r.cos())
}

/// Direction scaled so that its Chebyshev norm is one.
pub fn chebyshev_unit(deg: f64) -> (f64, f64) {
    let (c, s) = direction(deg);
    let m = c.abs().max(s.abs());
    (c / m, s / m)
}

/// Signed distance of `(qx, qy)` (relative to the line origin) along `v⊥_θ`.
pub fn perpendicular_offset(qx: f64, qy: f64, deg: f64) -> f64 {
    let (nx, ny) = normal(deg);
    qx * nx + qy * ny
}

/// Euclidean distance from point `p` to the closed segment `a`–`b`.
pub fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}
