//! Grayscale image container and PGM / PNG codecs.
//!
//! Intensities are stored as `f64` so that synthetic noise can be added
//! without quantization. Files are always written as 8-bit data, rounding
//! and clamping to `[0, 255]`.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Pixel;

/// Row-major grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::argument(format!(
                "image data has {} values, expected {}x{}={}",
                data.len(),
                width,
                height,
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn contains(&self, p: Pixel) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    /// Quantize to 8 bits by round-and-clamp.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }

    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(width, height, bytes.iter().map(|&b| f64::from(b)).collect())
    }
}

pub(crate) fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        0
    } else {
        v.round().clamp(0.0, 255.0) as u8
    }
}

/// Load a PGM (P2/P5) or PNG file, chosen by content signature.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let bytes = fs::read(path.as_ref())?;
    decode_image(&bytes)
}

pub fn decode_image(bytes: &[u8]) -> Result<Image> {
    if bytes.starts_with(b"\x89PNG") {
        decode_png(bytes)
    } else if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::format(
            "netpbm",
            format!("P{} is not a grayscale PGM", bytes[1] as char),
        ))
    } else {
        Err(Error::format("image", "unrecognized file signature"))
    }
}

/// Save to PGM (P5) or PNG depending on the file extension (`.png` → PNG).
pub fn save_image(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let bytes = if is_png {
        encode_png(image)?
    } else {
        encode_pgm(image)
    };
    fs::write(path, bytes)?;
    Ok(())
}

struct PgmTokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmTokens<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            if self.pos >= self.bytes.len() {
                return Err(Error::Io(io::Error::new(
                    io::ErrorKind::UnexpectedEof,
                    format!("PGM ended while reading {what}"),
                )));
            }
            return Err(Error::format("PGM", format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format("PGM", format!("{what} out of range")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(Error::format("PGM", "missing P2/P5 magic")),
    };
    let mut tok = PgmTokens { bytes, pos: 2 };
    let width = tok.number("width")? as usize;
    let height = tok.number("height")? as usize;
    let maxval = tok.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::format(
            "PGM",
            format!("maxval {maxval} not supported (1..=255)"),
        ));
    }
    let scale = 255.0 / f64::from(maxval);
    let count = width * height;
    let mut data = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = tok.pos + 1;
        let raster = bytes.get(start..).unwrap_or(&[]);
        if raster.len() < count {
            return Err(Error::Io(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                format!("P5 raster has {} bytes, expected {}", raster.len(), count),
            )));
        }
        for &b in &raster[..count] {
            if u32::from(b) > maxval {
                return Err(Error::format("PGM", "sample exceeds maxval"));
            }
            data.push(f64::from(b) * scale);
        }
    } else {
        for _ in 0..count {
            let v = tok.number("sample")?;
            if v > maxval {
                return Err(Error::format("PGM", "sample exceeds maxval"));
            }
            data.push(f64::from(v) * scale);
        }
    }
    Image::new(width, height, data)
}

pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(image.to_u8());
    out
}

pub fn decode_png(bytes: &[u8]) -> Result<Image> {
    let mut decoder = png::Decoder::new(io::Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::format("PNG", e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::format("PNG", "image too large"))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::format("PNG", e.to_string()))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::format(
            "PNG",
            format!("{:?}-bit samples are not supported", info.bit_depth),
        ));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let buf = &buf[..info.buffer_size()];
    let data = (0..w * h)
        .map(|i| {
            let px = &buf[i * channels..(i + 1) * channels];
            match info.color_type {
                png::ColorType::Grayscale | png::ColorType::GrayscaleAlpha => f64::from(px[0]),
                _ => luma(px[0], px[1], px[2]),
            }
        })
        .collect();
    Image::new(w, h, data)
}

fn luma(r: u8, g: u8, b: u8) -> f64 {
    (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)).round()
}

pub fn encode_png(image: &Image) -> Result<Vec<u8>> {
    encode_png_gray(image.width, image.height, &image.to_u8())
}

pub(crate) fn encode_png_gray(width: usize, height: usize, pixels: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(BufWriter::new(&mut out), width as u32, height as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| Error::format("PNG", e.to_string()))?;
        writer
            .write_image_data(pixels)
            .map_err(|e| Error::format("PNG", e.to_string()))?;
        writer
            .finish()
            .map_err(|e| Error::format("PNG", e.to_string()))?;
    }
    Ok(out)
}

/// Write an 8-bit plane as binary PGM.
pub(crate) fn write_pgm_bytes(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    pixels: &[u8],
) -> Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    write!(f, "P5\n{width} {height}\n255\n")?;
    f.write_all(pixels)?;
    f.flush()?;
    Ok(())
}
