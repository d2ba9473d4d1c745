//! Oriented central differences and signed directional edge maps.
//!
//! Each derivative plane is a central difference along one of four grid
//! directions `u_θ`: `∇_θ I(p) = I(p − u_θ) − I(p + u_θ)` with
//! `u_0 = (1,0)`, `u_45 = (1,1)`, `u_90 = (0,1)`, `u_135 = (−1,1)` in image
//! coordinates. In particular `∇_0 I(x,y) = I(x−1,y) − I(x+1,y)`.

use crate::error::{Error, Result};
use crate::geom::{normal, wrap180, Pixel};
use crate::image::Image;

/// One of the four kernel orientations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    D0 = 0,
    D45 = 1,
    D90 = 2,
    D135 = 3,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::D0,
        Orientation::D45,
        Orientation::D90,
        Orientation::D135,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn degrees(self) -> f64 {
        45.0 * self as usize as f64
    }

    /// Grid step `u_θ` the derivative is taken along.
    pub fn step(self) -> (i64, i64) {
        match self {
            Orientation::D0 => (1, 0),
            Orientation::D45 => (1, 1),
            Orientation::D90 => (0, 1),
            Orientation::D135 => (-1, 1),
        }
    }
}

/// Map used for a neighbour seen at orientation `theta_rel` from the seed:
/// the kernel closest to the direction perpendicular to `theta_rel`.
pub fn select_directional_map(theta_rel: f64) -> Orientation {
    let t = wrap180(theta_rel);
    if t <= 22.5 || t > 157.5 {
        Orientation::D90
    } else if t <= 67.5 {
        Orientation::D135
    } else if t <= 112.5 {
        Orientation::D0
    } else {
        Orientation::D45
    }
}

/// Transition polarity of a derivative value, expressed against the normal
/// of the line orientation `line_deg` so that values taken from different
/// kernels along the same edge agree.
pub fn polarity(map: Orientation, grad: f64, line_deg: f64) -> i8 {
    if grad == 0.0 {
        return 0;
    }
    let (ux, uy) = map.step();
    let (nx, ny) = normal(line_deg);
    let dot = ux as f64 * nx + uy as f64 * ny;
    let s = if dot >= 0.0 { 1 } else { -1 };
    if grad > 0.0 {
        s
    } else {
        -s
    }
}

/// The four raw derivative planes. Border pixels are zero.
#[derive(Debug, Clone)]
pub struct Gradients {
    width: usize,
    height: usize,
    planes: [Vec<f64>; 4],
}

impl Gradients {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn plane(&self, o: Orientation) -> &[f64] {
        &self.planes[o.index()]
    }

    #[inline]
    pub fn get(&self, o: Orientation, x: usize, y: usize) -> f64 {
        self.planes[o.index()][y * self.width + x]
    }
}

pub fn directional_derivatives(image: &Image) -> Result<Gradients> {
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(Error::argument(format!(
            "image is {w}x{h}; edge analysis needs at least 3x3"
        )));
    }
    let planes = Orientation::ALL.map(|o| {
        let (ux, uy) = o.step();
        let mut plane = vec![0.0; w * h];
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                let back = image.get((x as i64 - ux) as usize, (y as i64 - uy) as usize);
                let fwd = image.get((x as i64 + ux) as usize, (y as i64 + uy) as usize);
                plane[y * w + x] = back - fwd;
            }
        }
        plane
    });
    Ok(Gradients {
        width: w,
        height: h,
        planes,
    })
}

/// Derivative planes plus their ternary thresholded versions.
#[derive(Debug, Clone)]
pub struct DirectionalEdgeMaps {
    grads: Gradients,
    edges: [Vec<i8>; 4],
    threshold: f64,
}

pub fn threshold_edges(grads: Gradients, threshold: f64) -> Result<DirectionalEdgeMaps> {
    if !(threshold > 0.0) {
        return Err(Error::argument(format!(
            "edge threshold must be positive, got {threshold}"
        )));
    }
    let edges = Orientation::ALL.map(|o| {
        grads
            .plane(o)
            .iter()
            .map(|&g| ternary(g, threshold))
            .collect()
    });
    Ok(DirectionalEdgeMaps {
        grads,
        edges,
        threshold,
    })
}

#[inline]
pub fn ternary(g: f64, threshold: f64) -> i8 {
    if g >= threshold {
        1
    } else if g <= -threshold {
        -1
    } else {
        0
    }
}

/// Derivatives and thresholding in one step.
pub fn edge_maps(image: &Image, threshold: f64) -> Result<DirectionalEdgeMaps> {
    threshold_edges(directional_derivatives(image)?, threshold)
}

impl DirectionalEdgeMaps {
    pub fn width(&self) -> usize {
        self.grads.width
    }

    pub fn height(&self) -> usize {
        self.grads.height
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn gradients(&self) -> &Gradients {
        &self.grads
    }

    pub fn edge_plane(&self, o: Orientation) -> &[i8] {
        &self.edges[o.index()]
    }

    #[inline]
    pub fn edge(&self, o: Orientation, x: usize, y: usize) -> i8 {
        self.edges[o.index()][y * self.grads.width + x]
    }

    #[inline]
    pub fn grad(&self, o: Orientation, x: usize, y: usize) -> f64 {
        self.grads.get(o, x, y)
    }

    pub fn contains(&self, p: Pixel) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width() && (p.y as usize) < self.height()
    }

    #[inline]
    pub fn is_edge_point(&self, x: usize, y: usize) -> bool {
        let i = y * self.grads.width + x;
        self.edges.iter().any(|e| e[i] != 0)
    }

    pub fn edge_points(&self) -> Vec<Pixel> {
        let mut out = Vec::new();
        for y in 0..self.height() {
            for x in 0..self.width() {
                if self.is_edge_point(x, y) {
                    out.push(Pixel::new(x as i64, y as i64));
                }
            }
        }
        out
    }

    /// 8-bit rendering of one edge plane: −1 → 0, 0 → 128, +1 → 255.
    pub fn edge_plane_u8(&self, o: Orientation) -> Vec<u8> {
        self.edge_plane(o)
            .iter()
            .map(|&e| match e {
                -1 => 0,
                0 => 128,
                _ => 255,
            })
            .collect()
    }
}
