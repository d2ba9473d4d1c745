use std::ffi::{CStr, CString};
use std::ptr;

use straight::synth::gen_crossing_lines;
use straight_ffi::*;

fn last_error() -> String {
    let p = straight_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn image_of(scene: &straight::Image) -> *mut StraightImage {
    let bytes = scene.to_u8();
    let mut img = ptr::null_mut();
    let s =
        unsafe { straight_image_from_u8(scene.width(), scene.height(), bytes.as_ptr(), &mut img) };
    assert_eq!(s, StraightStatus::Ok);
    img
}

fn collect(list: *const StraightSegments) -> Vec<StraightSegment> {
    let n = unsafe { straight_segments_len(list) };
    (0..n)
        .map(|i| {
            let mut s = StraightSegment {
                x1: 0.0,
                y1: 0.0,
                x2: 0.0,
                y2: 0.0,
                length: 0.0,
                support: 0,
                theta_deg: 0.0,
            };
            assert_eq!(
                unsafe { straight_segments_get(list, i, &mut s) },
                StraightStatus::Ok
            );
            s
        })
        .collect()
}

#[test]
fn defaults_match_the_core() {
    let mut p = std::mem::MaybeUninit::<StraightParams>::uninit();
    assert_eq!(
        unsafe { straight_params_default(p.as_mut_ptr()) },
        StraightStatus::Ok
    );
    let p = unsafe { p.assume_init() };
    let core = straight::ExtractParams::default();
    assert_eq!(p.threshold, core.threshold);
    assert_eq!(p.bins as usize, core.histogram.bins);
    assert_eq!(p.grid as usize, core.map.grid);
    assert_eq!(p.zoom, 1);
}

#[test]
fn extraction_matches_the_core() {
    let scene = gen_crossing_lines(8, 256, 256, 1).unwrap();
    let img = image_of(&scene.image);
    assert_eq!(unsafe { straight_image_width(img) }, 256);
    let mut list = ptr::null_mut();
    assert_eq!(
        unsafe { straight_extract(img, ptr::null(), &mut list) },
        StraightStatus::Ok
    );
    let got = collect(list);
    let core = straight::extract_all(
        &straight::Image::from_u8(256, 256, &scene.image.to_u8()).unwrap(),
        &straight::ExtractParams::default(),
    )
    .unwrap();
    assert_eq!(got.len(), core.len());
    assert!(!got.is_empty());
    for (a, b) in got.iter().zip(&core) {
        assert_eq!((a.x1, a.y1), (b.p_minus.x as f64, b.p_minus.y as f64));
        assert_eq!((a.x2, a.y2), (b.p_plus.x as f64, b.p_plus.y as f64));
        assert_eq!(a.length, f64::from(b.length));
        assert_eq!(a.support, b.support as u64);
    }
    unsafe {
        straight_segments_free(list);
        straight_image_free(img);
    }
}

#[test]
fn hough_baseline_runs() {
    let scene = gen_crossing_lines(4, 128, 128, 3).unwrap();
    let img = image_of(&scene.image);
    let mut list = ptr::null_mut();
    assert_eq!(
        unsafe { straight_hough_extract(img, 15.0, &mut list) },
        StraightStatus::Ok
    );
    assert!(unsafe { straight_segments_len(list) } > 0);
    unsafe {
        straight_segments_free(list);
        straight_image_free(img);
    }
}

#[test]
fn custom_params_are_applied() {
    let scene = gen_crossing_lines(8, 256, 256, 2).unwrap();
    let img = image_of(&scene.image);
    let mut p = std::mem::MaybeUninit::<StraightParams>::uninit();
    unsafe { straight_params_default(p.as_mut_ptr()) };
    let mut p = unsafe { p.assume_init() };
    p.min_length = 150;
    let mut list = ptr::null_mut();
    assert_eq!(
        unsafe { straight_extract(img, &p, &mut list) },
        StraightStatus::Ok
    );
    let segs = collect(list);
    assert!(segs.iter().all(|s| s.length >= 150.0));
    unsafe {
        straight_segments_free(list);
        straight_image_free(img);
    }
}

#[test]
fn errors_are_reported() {
    let mut img = ptr::null_mut();
    let bytes = [0u8; 4];
    assert_eq!(
        unsafe { straight_image_from_u8(2, 2, ptr::null(), &mut img) },
        StraightStatus::NullPointer
    );
    assert!(last_error().contains("null"));

    assert_eq!(
        unsafe { straight_image_from_u8(2, 2, bytes.as_ptr(), &mut img) },
        StraightStatus::Ok
    );
    let mut list = ptr::null_mut();
    // 2x2 is too small for the derivative kernels
    assert_eq!(
        unsafe { straight_extract(img, ptr::null(), &mut list) },
        StraightStatus::InvalidArgument
    );
    assert!(last_error().contains("3x3"));
    assert!(list.is_null());

    let mut p = std::mem::MaybeUninit::<StraightParams>::uninit();
    unsafe { straight_params_default(p.as_mut_ptr()) };
    let mut p = unsafe { p.assume_init() };
    p.threshold = -1.0;
    let big = image_of(&straight::Image::filled(16, 16, 0.0));
    assert_eq!(
        unsafe { straight_extract(big, &p, &mut list) },
        StraightStatus::InvalidArgument
    );

    let missing = CString::new("/nonexistent/straight.png").unwrap();
    assert_eq!(
        unsafe { straight_image_load(missing.as_ptr(), &mut img) },
        StraightStatus::Io
    );

    assert_eq!(
        unsafe { straight_extract(big, ptr::null(), &mut list) },
        StraightStatus::Ok
    );
    assert!(straight_last_error_message().is_null());
    let mut s = std::mem::MaybeUninit::<StraightSegment>::uninit();
    assert_eq!(
        unsafe { straight_segments_get(list, 0, s.as_mut_ptr()) },
        StraightStatus::OutOfRange
    );
    unsafe {
        straight_segments_free(list);
        straight_image_free(big);
        straight_image_free(img);
        straight_image_free(ptr::null_mut());
        straight_segments_free(ptr::null_mut());
    }
    assert_eq!(unsafe { straight_image_width(ptr::null()) }, 0);
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(straight_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
