//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any of them fails.

mod common;

use std::process::Command;
use std::time::Instant;

use common::{gapped_line, matched_peaks, oracle_length_map, per_side, random_scene};
use straight::cli::{make_scene, SceneKind};
use straight::directions::{DirectionStore, HistogramParams};
use straight::edges::edge_maps;
use straight::extract::{extract_all, extract_with_stats, ExtractParams};
use straight::geom::Pixel;
use straight::hough::{hough_baseline, HoughParams};
use straight::image::save_image;
use straight::length_map::{fill_half_plane, update_region, HalfPlane, MapParams, Span};
use straight::score::{score, ScoreReport, ScoreTolerances, Seg};
use straight::synth::{gen_crossing_lines, gen_textured_boundary, Scene, TextureKind};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn straight_report(scene: &Scene, params: &ExtractParams) -> (ScoreReport, u64) {
    let r = extract_with_stats(&scene.image, params).unwrap();
    let segs: Vec<Seg> = r.segments.iter().map(Seg::from).collect();
    (
        score(&segs, &scene.truth, &ScoreTolerances::default()),
        r.stats.scanned,
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let params = MapParams {
        zoom: false,
        ..MapParams::default()
    };
    let (mut maps, mut bad) = (0usize, 0usize);
    for scene in 0..20u64 {
        let img = random_scene(20 + (scene as usize % 13), 1000 + scene);
        let edges = edge_maps(&img, 15.0).unwrap();
        let store = DirectionStore::build(&edges, &HistogramParams::default()).unwrap();
        for seed in store.seeds().collect::<Vec<_>>() {
            for entry in store.entries(seed).to_vec() {
                for half in [HalfPlane::Plus, HalfPlane::Minus] {
                    let got = fill_half_plane(seed, entry.theta, half, &store, &params);
                    bad += usize::from(
                        got.cells != oracle_length_map(&store, seed, entry.theta, half, &params),
                    );
                    maps += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        bad == 0 && maps > 0 && secs < 60.0,
        format!("{maps} maps, {bad} mismatched, {secs:.1} s"),
    )
}

fn crossing_recall() -> Outcome {
    let start = Instant::now();
    let scene = gen_crossing_lines(8, 256, 256, 1).unwrap();
    let (rep, _) = straight_report(&scene, &ExtractParams::default());
    let hp = HoughParams::default();
    let edges = edge_maps(&scene.image, 15.0).unwrap();
    let ht = hough_baseline(&edges, &hp).unwrap();
    let lines: Vec<(f64, f64)> = ht.lines.iter().map(|l| (l.rho, l.theta_deg)).collect();
    let peaks = matched_peaks(&scene.truth, &lines, hp.rho_step, hp.theta_step);
    let secs = start.elapsed().as_secs_f64();
    check(
        rep.recall >= 0.9 && rep.fragmentation <= 1.2 && rep.endpoint_error <= 3.0 && peaks == 8 && secs < 120.0,
        format!(
            "recall {:.3}, fragmentation {:.3}, endpoint error {:.2} px, HT peaks {peaks}/8, {secs:.1} s",
            rep.recall, rep.fragmentation, rep.endpoint_error
        ),
    )
}

fn textured_boundary() -> Outcome {
    let scene = gen_textured_boundary(TextureKind::FlatVsTexture, 15.0, 1).unwrap();
    let segs = extract_all(&scene.image, &ExtractParams::default()).unwrap();
    let segs: Vec<Seg> = segs.iter().map(Seg::from).collect();
    let rep = score(&segs, &scene.truth, &ScoreTolerances::default());
    let min_cov = rep.coverage.iter().copied().fold(f64::INFINITY, f64::min);
    let longest_spur = rep
        .unmatched_extracted
        .iter()
        .map(|&i| segs[i].length())
        .fold(0.0, f64::max);
    let edges = edge_maps(&scene.image, 15.0).unwrap();
    let ht = hough_baseline(
        &edges,
        &HoughParams {
            top_k: 50,
            ..HoughParams::default()
        },
    )
    .unwrap();
    let half = ht.accumulator.max() / 2;
    let strong = ht.lines.iter().filter(|l| l.votes > half).count();
    check(
        rep.coverage.len() == 4 && min_cov >= 0.9 && longest_spur < 20.0 && strong > 4,
        format!(
            "min coverage {min_cov:.3}, {} spurs, longest {longest_spur:.1} px, HT {strong} above half max",
            rep.unmatched_extracted.len()
        ),
    )
}

fn gap_law() -> Outcome {
    let p = ExtractParams::default();
    let d = p.map.max_gap;
    let mut failures = Vec::new();
    for angle in [0.0, 45.0, 90.0, 17.0] {
        let joined = per_side(&extract_all(&gapped_line(angle, d), &p).unwrap(), angle);
        let split = per_side(&extract_all(&gapped_line(angle, d + 1), &p).unwrap(), angle);
        // a bright line has two flanks, each its own edge
        if joined != [1, 1] || split != [2, 2] {
            failures.push(format!(
                "{angle}°: gap {d} {joined:?}, gap {} {split:?}",
                d + 1
            ));
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("d = {d}: one segment per flank at gap d, two at d+1, angles 0/45/90/17")
        } else {
            failures.join("; ")
        },
    )
}

fn noise_monotonicity() -> Outcome {
    let recall: Vec<f64> = [0.0, 10.0, 20.0]
        .iter()
        .map(|&sigma| {
            straight_report(
                &make_scene(SceneKind::Grid, 0, 256, sigma, 1).unwrap(),
                &ExtractParams::default(),
            )
            .0
            .recall
        })
        .collect();
    check(
        recall[0] >= recall[1] && recall[1] >= recall[2] && recall[1] >= 0.8,
        format!(
            "recall at σ 0/10/20: {:.3} / {:.3} / {:.3}",
            recall[0], recall[1], recall[2]
        ),
    )
}

fn region_geometry() -> Outcome {
    let radius = MapParams::default().uncertainty_radius;
    let dp = Span::new(-1.0, 1.0);
    let dt = Span::new(-10.0, 10.0);
    let g = 4001;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for dist in [20i64, 50, 100] {
        let r = update_region(
            Pixel::new(0, 0),
            0.0,
            Pixel::new(dist, 0),
            radius,
            dp,
            dt,
            g,
        );
        // columns whose δp interval holds δp = 0
        let hits = (0..g)
            .filter(|&j| r.bounds[j].0 <= 0.0 && 0.0 <= r.bounds[j].1)
            .count();
        let span = hits as f64 * dt.width() / g as f64;
        let want = 2.0 * (radius / dist as f64).asin().to_degrees();
        let rel = (span - want).abs() / want;
        worst = worst.max(rel);
        parts.push(format!("{dist}: {span:.3}° vs {want:.3}°"));
    }
    check(
        worst <= 0.1,
        format!("{}, worst {:.1}%", parts.join(", "), 100.0 * worst),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("crossing.pgm");
    save_image(&gen_crossing_lines(8, 256, 256, 1).unwrap().image, &input).unwrap();
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_straight"))
            .args([
                "extract",
                "--input",
                input.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let runs: Vec<Vec<u8>> = ["1", "1", "8", "8"].iter().map(|t| run(t)).collect();
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    check(
        same && !runs[0].is_empty(),
        format!("{} bytes, threads 1 and 8 identical: {same}", runs[0].len()),
    )
}

fn zoom_benefit() -> Outcome {
    let scene = gen_crossing_lines(8, 256, 256, 1).unwrap();
    let mut off = ExtractParams::default();
    off.map.zoom = false;
    let (zoomed, on_scan) = straight_report(&scene, &ExtractParams::default());
    let (plain, off_scan) = straight_report(&scene, &off);
    let overlap = ScoreTolerances::default().overlap;
    let lost = (0..scene.truth.len())
        .filter(|&i| plain.coverage[i] >= overlap && zoomed.coverage[i] < overlap)
        .count();
    let ratio = on_scan as f64 / off_scan as f64;
    check(
        ratio <= 0.5 && lost == 0,
        format!(
            "scanned {on_scan} vs {off_scan} (ratio {ratio:.3}), recall {:.3} vs {:.3}, {lost} truths lost",
            zoomed.recall, plain.recall
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("crossing-lines recall", crossing_recall),
        ("textured boundary", textured_boundary),
        ("gap law", gap_law),
        ("noise monotonicity", noise_monotonicity),
        ("update-region geometry", region_geometry),
        ("determinism", determinism),
        ("zoom benefit", zoom_benefit),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", k + 1),
            Err(detail) => {
                println!("FAIL {}. {name}: {detail}", k + 1);
                failed.push(*name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
