mod common;

use common::{gapped_line, per_side};
use straight::extract::{extract_all, ExtractParams};

#[test]
fn gap_law_in_the_full_pipeline() {
    let p = ExtractParams::default();
    let d = p.map.max_gap;
    for angle in [0.0, 45.0, 90.0, 17.0] {
        let joined = per_side(&extract_all(&gapped_line(angle, d), &p).unwrap(), angle);
        let split = per_side(&extract_all(&gapped_line(angle, d + 1), &p).unwrap(), angle);
        assert_eq!(joined, [1, 1], "angle {angle}, gap {d}");
        assert_eq!(split, [2, 2], "angle {angle}, gap {}", d + 1);
    }
}

#[test]
fn gap_law_for_larger_d() {
    for d in [3, 4] {
        let mut p = ExtractParams::default();
        p.map.max_gap = d;
        for angle in [0.0, 45.0, 90.0, 17.0] {
            let joined = per_side(&extract_all(&gapped_line(angle, d), &p).unwrap(), angle);
            let split = per_side(&extract_all(&gapped_line(angle, d + 1), &p).unwrap(), angle);
            assert_eq!((joined, split), ([1, 1], [2, 2]), "d {d}, angle {angle}");
        }
    }
}

#[test]
fn unbroken_lines_between_bins_stay_whole() {
    // a line between two bin centres is seen by both; the weaker direction
    // of a seed must not claim a short piece of it first
    let p = ExtractParams::default();
    for angle in [17.0, 30.0, 63.0, 120.0, 150.0] {
        assert_eq!(
            per_side(&extract_all(&gapped_line(angle, 0), &p).unwrap(), angle),
            [1, 1],
            "angle {angle}"
        );
    }
}
