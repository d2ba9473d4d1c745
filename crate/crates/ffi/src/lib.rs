//! C ABI for the `straight` line segment extractor.
//!
//! Images and segment lists are opaque handles created and released by this
//! library. Every fallible call returns a [`StraightStatus`]; on failure the
//! message can be read with [`straight_last_error_message`] on the same
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use straight::directions::HistogramParams;
use straight::edges::edge_maps;
use straight::hough::{hough_baseline, HoughParams};
use straight::image::{load_image, Image};
use straight::length_map::MapParams;
use straight::{Error, ExtractParams};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StraightStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    OutOfRange = 5,
    Panic = 6,
}

/// Opaque grayscale image.
pub struct StraightImage {
    inner: Image,
}

/// Opaque list of extracted segments.
pub struct StraightSegments {
    items: Vec<StraightSegment>,
}

/// One segment. Coordinates are pixel centres in image space (x right,
/// y down).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightSegment {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    /// `L+ + L-` for STRAIGHT, Euclidean length for the Hough baseline.
    pub length: f64,
    /// Supporting edge points.
    pub support: u64,
    pub theta_deg: f64,
}

/// Extraction parameters. Fill with [`straight_params_default`] and then
/// override single fields.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightParams {
    pub threshold: f64,
    pub bins: u32,
    pub window_radius: f64,
    pub prominence_fraction: f64,
    pub min_votes: f64,
    pub max_gap: u32,
    pub uncertainty_radius: f64,
    pub position_range: f64,
    pub grid: u32,
    /// Nonzero enables hierarchical zoom.
    pub zoom: u8,
    pub min_length: u32,
    pub support_fraction: f64,
}

impl From<&ExtractParams> for StraightParams {
    fn from(p: &ExtractParams) -> Self {
        Self {
            threshold: p.threshold,
            bins: p.histogram.bins as u32,
            window_radius: p.histogram.window_radius,
            prominence_fraction: p.histogram.prominence_fraction,
            min_votes: p.histogram.min_votes,
            max_gap: p.map.max_gap as u32,
            uncertainty_radius: p.map.uncertainty_radius,
            position_range: p.map.position_range,
            grid: p.map.grid as u32,
            zoom: p.map.zoom as u8,
            min_length: p.min_length,
            support_fraction: p.support_fraction,
        }
    }
}

impl StraightParams {
    fn to_core(self) -> ExtractParams {
        let base = ExtractParams::default();
        ExtractParams {
            threshold: self.threshold,
            histogram: HistogramParams {
                bins: self.bins as usize,
                window_radius: self.window_radius,
                prominence_fraction: self.prominence_fraction,
                min_votes: self.min_votes,
            },
            map: MapParams {
                grid: self.grid as usize,
                max_gap: i64::from(self.max_gap),
                uncertainty_radius: self.uncertainty_radius,
                position_range: self.position_range,
                zoom: self.zoom != 0,
                ..base.map
            },
            min_length: self.min_length,
            support_fraction: self.support_fraction,
            ..base
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: StraightStatus, message: impl Into<String>) -> StraightStatus {
    set_error(message.into());
    status
}

fn from_core(err: Error) -> StraightStatus {
    let status = match err {
        Error::Io(_) => StraightStatus::Io,
        Error::Format { .. } => StraightStatus::Format,
        Error::Argument(_) => StraightStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

/// Run `f`, turning panics into [`StraightStatus::Panic`].
fn guard(f: impl FnOnce() -> StraightStatus) -> StraightStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(StraightStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn emit<T>(out: *mut *mut T, value: T) -> StraightStatus {
    // SAFETY: callers checked `out` for null
    unsafe { *out = Box::into_raw(Box::new(value)) };
    StraightStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn straight_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn straight_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default parameters.
///
/// # Safety
/// `out` must be null or point to writable memory for one `StraightParams`.
#[no_mangle]
pub unsafe extern "C" fn straight_params_default(out: *mut StraightParams) -> StraightStatus {
    guard(|| {
        if out.is_null() {
            return fail(StraightStatus::NullPointer, "out is null");
        }
        // SAFETY: checked above, caller guarantees validity
        unsafe { *out = StraightParams::from(&ExtractParams::default()) };
        StraightStatus::Ok
    })
}

/// Image from `width * height` row-major 8-bit samples.
///
/// # Safety
/// `data` must point to `width * height` readable bytes; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn straight_image_from_u8(
    width: usize,
    height: usize,
    data: *const u8,
    out: *mut *mut StraightImage,
) -> StraightStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return fail(StraightStatus::NullPointer, "data or out is null");
        }
        let Some(n) = width.checked_mul(height) else {
            return fail(StraightStatus::InvalidArgument, "image size overflows");
        };
        // SAFETY: caller guarantees `n` readable bytes
        let bytes = unsafe { std::slice::from_raw_parts(data, n) };
        match Image::from_u8(width, height, bytes) {
            Ok(inner) => emit(out, StraightImage { inner }),
            Err(e) => from_core(e),
        }
    })
}

/// Image from `width * height` row-major intensities.
///
/// # Safety
/// `data` must point to `width * height` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn straight_image_from_f64(
    width: usize,
    height: usize,
    data: *const f64,
    out: *mut *mut StraightImage,
) -> StraightStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return fail(StraightStatus::NullPointer, "data or out is null");
        }
        let Some(n) = width.checked_mul(height) else {
            return fail(StraightStatus::InvalidArgument, "image size overflows");
        };
        // SAFETY: caller guarantees `n` readable doubles
        let values = unsafe { std::slice::from_raw_parts(data, n) };
        match Image::new(width, height, values.to_vec()) {
            Ok(inner) => emit(out, StraightImage { inner }),
            Err(e) => from_core(e),
        }
    })
}

/// Load a PNG or PGM file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn straight_image_load(
    path: *const c_char,
    out: *mut *mut StraightImage,
) -> StraightStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(StraightStatus::NullPointer, "path or out is null");
        }
        // SAFETY: caller guarantees a valid C string
        let Ok(path) = unsafe { CStr::from_ptr(path) }.to_str() else {
            return fail(StraightStatus::InvalidArgument, "path is not UTF-8");
        };
        match load_image(path) {
            Ok(inner) => emit(out, StraightImage { inner }),
            Err(e) => from_core(e),
        }
    })
}

/// Width in pixels, 0 for a null handle.
///
/// # Safety
/// `image` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn straight_image_width(image: *const StraightImage) -> usize {
    // SAFETY: caller guarantees a live handle or null
    unsafe { image.as_ref() }.map_or(0, |i| i.inner.width())
}

/// Height in pixels, 0 for a null handle.
///
/// # Safety
/// `image` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn straight_image_height(image: *const StraightImage) -> usize {
    // SAFETY: caller guarantees a live handle or null
    unsafe { image.as_ref() }.map_or(0, |i| i.inner.height())
}

/// Release an image. Null is ignored.
///
/// # Safety
/// `image` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn straight_image_free(image: *mut StraightImage) {
    if !image.is_null() {
        // SAFETY: the handle came from Box::into_raw
        drop(unsafe { Box::from_raw(image) });
    }
}

/// Run the STRAIGHT extractor. `params` may be null for the defaults.
///
/// # Safety
/// `image` must be a live handle, `params` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn straight_extract(
    image: *const StraightImage,
    params: *const StraightParams,
    out: *mut *mut StraightSegments,
) -> StraightStatus {
    guard(|| {
        if out.is_null() {
            return fail(StraightStatus::NullPointer, "out is null");
        }
        // SAFETY: caller guarantees a live handle or null
        let Some(image) = (unsafe { image.as_ref() }) else {
            return fail(StraightStatus::NullPointer, "image is null");
        };
        // SAFETY: caller guarantees readable params or null
        let params =
            unsafe { params.as_ref() }.map_or_else(ExtractParams::default, |p| p.to_core());
        match straight::extract_all(&image.inner, &params) {
            Ok(segs) => {
                let items = segs
                    .iter()
                    .map(|s| StraightSegment {
                        x1: s.p_minus.x as f64,
                        y1: s.p_minus.y as f64,
                        x2: s.p_plus.x as f64,
                        y2: s.p_plus.y as f64,
                        length: f64::from(s.length),
                        support: s.support as u64,
                        theta_deg: s.theta_deg(),
                    })
                    .collect();
                emit(out, StraightSegments { items })
            }
            Err(e) => from_core(e),
        }
    })
}

/// Run the classical Hough baseline with edge threshold `threshold` and
/// its default settings otherwise.
///
/// # Safety
/// `image` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn straight_hough_extract(
    image: *const StraightImage,
    threshold: f64,
    out: *mut *mut StraightSegments,
) -> StraightStatus {
    guard(|| {
        if out.is_null() {
            return fail(StraightStatus::NullPointer, "out is null");
        }
        // SAFETY: caller guarantees a live handle or null
        let Some(image) = (unsafe { image.as_ref() }) else {
            return fail(StraightStatus::NullPointer, "image is null");
        };
        let result = edge_maps(&image.inner, threshold)
            .and_then(|maps| hough_baseline(&maps, &HoughParams::default()));
        match result {
            Ok(r) => {
                let items = r
                    .segments
                    .iter()
                    .map(|s| StraightSegment {
                        x1: s.a.x as f64,
                        y1: s.a.y as f64,
                        x2: s.b.x as f64,
                        y2: s.b.y as f64,
                        length: s.length(),
                        support: s.inliers as u64,
                        theta_deg: s.theta_deg,
                    })
                    .collect();
                emit(out, StraightSegments { items })
            }
            Err(e) => from_core(e),
        }
    })
}

/// Number of segments, 0 for a null handle.
///
/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn straight_segments_len(list: *const StraightSegments) -> usize {
    // SAFETY: caller guarantees a live handle or null
    unsafe { list.as_ref() }.map_or(0, |l| l.items.len())
}

/// Copy segment `index` into `out`.
///
/// # Safety
/// `list` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn straight_segments_get(
    list: *const StraightSegments,
    index: usize,
    out: *mut StraightSegment,
) -> StraightStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle or null
        let Some(list) = (unsafe { list.as_ref() }) else {
            return fail(StraightStatus::NullPointer, "list is null");
        };
        if out.is_null() {
            return fail(StraightStatus::NullPointer, "out is null");
        }
        match list.items.get(index) {
            Some(s) => {
                // SAFETY: checked above
                unsafe { *out = *s };
                StraightStatus::Ok
            }
            None => fail(
                StraightStatus::OutOfRange,
                format!(
                    "index {index} out of range for {} segments",
                    list.items.len()
                ),
            ),
        }
    })
}

/// Release a segment list. Null is ignored.
///
/// # Safety
/// `list` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn straight_segments_free(list: *mut StraightSegments) {
    if !list.is_null() {
        // SAFETY: the handle came from Box::into_raw
        drop(unsafe { Box::from_raw(list) });
    }
}
