//! Segment overlays: raster (PNG/PGM) via Bresenham and vector (SVG).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Pixel;
use crate::image::{encode_png_gray, Image};

/// Value written on overlay pixels.
pub const OVERLAY_VALUE: u8 = 255;

/// Anything with two integer endpoints can be drawn.
pub trait Endpoints {
    fn endpoints(&self) -> (Pixel, Pixel);
}

impl Endpoints for (Pixel, Pixel) {
    fn endpoints(&self) -> (Pixel, Pixel) {
        *self
    }
}

/// Pixels of the 8-connected Bresenham line from `a` to `b`, both included.
pub fn bresenham(a: Pixel, b: Pixel) -> Vec<Pixel> {
    let dx = (b.x - a.x).abs();
    let dy = -(b.y - a.y).abs();
    let sx = if a.x < b.x { 1 } else { -1 };
    let sy = if a.y < b.y { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = (a.x, a.y);
    let mut out = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        out.push(Pixel::new(x, y));
        if x == b.x && y == b.y {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}

fn check_bounds<S: Endpoints>(image: &Image, segments: &[S]) -> Result<()> {
    for (i, s) in segments.iter().enumerate() {
        let (a, b) = s.endpoints();
        for p in [a, b] {
            if !image.contains(p) {
                return Err(Error::argument(format!(
                    "segment {i} endpoint ({}, {}) outside {}x{} image",
                    p.x,
                    p.y,
                    image.width(),
                    image.height()
                )));
            }
        }
    }
    Ok(())
}

/// Quantized image with the segments burnt in.
pub fn draw_segments<S: Endpoints>(image: &Image, segments: &[S]) -> Result<Vec<u8>> {
    check_bounds(image, segments)?;
    let mut pixels = image.to_u8();
    for s in segments {
        let (a, b) = s.endpoints();
        for p in bresenham(a, b) {
            pixels[p.y as usize * image.width() + p.x as usize] = OVERLAY_VALUE;
        }
    }
    Ok(pixels)
}

/// Write the overlay as PNG (or binary PGM when the extension is `.pgm`).
pub fn render_overlay<S: Endpoints>(
    image: &Image,
    segments: &[S],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let pixels = draw_segments(image, segments)?;
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        crate::image::write_pgm_bytes(path, image.width(), image.height(), &pixels)
    } else {
        fs::write(
            path,
            encode_png_gray(image.width(), image.height(), &pixels)?,
        )?;
        Ok(())
    }
}

/// SVG document with one `<line>` element per segment.
pub fn overlay_svg<S: Endpoints>(image: &Image, segments: &[S]) -> Result<String> {
    check_bounds(image, segments)?;
    let (w, h) = (image.width(), image.height());
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"  <rect width="{w}" height="{h}" fill="black"/>"#);
    for s in segments {
        let (a, b) = s.endpoints();
        // pixel centres sit at +0.5 in SVG user space
        let _ = writeln!(
            svg,
            r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="red" stroke-width="1"/>"#,
            a.x as f64 + 0.5,
            a.y as f64 + 0.5,
            b.x as f64 + 0.5,
            b.y as f64 + 0.5
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_svg<S: Endpoints>(
    image: &Image,
    segments: &[S],
    path: impl AsRef<Path>,
) -> Result<()> {
    fs::write(path, overlay_svg(image, segments)?)?;
    Ok(())
}
