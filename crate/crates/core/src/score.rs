//! Scoring extracted segments against ground truth.
//!
//! An extracted segment is compatible with a truth segment when their
//! orientations agree within `angle_deg`, it stays within `distance` of the
//! truth line where the two overlap, and the overlap is non-empty. Extracted
//! segments are assigned greedily by decreasing overlap, each to at most one
//! truth. A truth is matched when the union of its assigned pieces covers
//! at least `overlap` of its length.
//!
//! Step edges and thin lines are usually found once per transition side,
//! so assigned pieces are grouped into side tracks by the sign of their
//! offset from the truth line. Fragmentation and endpoint error are
//! computed per track.

use serde::Serialize;

use crate::extract::LineSegment;
use crate::geom::orientation_diff;
use crate::hough::HoughSegment;
use crate::synth::TruthSegment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreTolerances {
    pub angle_deg: f64,
    pub distance: f64,
    pub overlap: f64,
    /// Offsets within this band of the truth line form their own track.
    pub side_dead_zone: f64,
}

impl Default for ScoreTolerances {
    fn default() -> Self {
        Self {
            angle_deg: 2.0,
            distance: 2.0,
            overlap: 0.8,
            side_dead_zone: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub recall: f64,
    pub precision: f64,
    /// Mean pieces per track of matched truths.
    pub fragmentation: f64,
    /// Mean distance from truth endpoints to the nearest endpoint of their track.
    pub endpoint_error: f64,
    pub truth_count: usize,
    pub extracted_count: usize,
    pub matched: usize,
    /// Covered fraction of each truth segment, in truth order.
    pub coverage: Vec<f64>,
    /// Indices of extracted segments not assigned to any matched truth.
    pub unmatched_extracted: Vec<usize>,
}

/// Plain segment used for scoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Seg {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

impl Seg {
    pub fn new(a: (f64, f64), b: (f64, f64)) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        (self.b.0 - self.a.0).hypot(self.b.1 - self.a.1)
    }

    pub fn angle_deg(&self) -> f64 {
        (self.b.1 - self.a.1)
            .atan2(self.b.0 - self.a.0)
            .to_degrees()
            .rem_euclid(180.0)
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.b, self.a)
    }
}

impl From<&TruthSegment> for Seg {
    fn from(t: &TruthSegment) -> Self {
        Seg::new((t.x1, t.y1), (t.x2, t.y2))
    }
}

impl From<&LineSegment> for Seg {
    fn from(s: &LineSegment) -> Self {
        Seg::new(s.p_minus.to_f64(), s.p_plus.to_f64())
    }
}

impl From<&HoughSegment> for Seg {
    fn from(s: &HoughSegment) -> Self {
        Seg::new(s.a.to_f64(), s.b.to_f64())
    }
}

/// Overlap of `s` along truth `t`: `(t0, t1, signed mean offset)` or `None`
/// if the two are incompatible.
fn relate(t: &Seg, s: &Seg, tol: &ScoreTolerances) -> Option<(f64, f64, f64)> {
    let len = t.length();
    if len == 0.0 || orientation_diff(t.angle_deg(), s.angle_deg()) > tol.angle_deg {
        return None;
    }
    let (ux, uy) = ((t.b.0 - t.a.0) / len, (t.b.1 - t.a.1) / len);
    let (nx, ny) = (-uy, ux);
    let along = |p: (f64, f64)| (p.0 - t.a.0) * ux + (p.1 - t.a.1) * uy;
    let across = |p: (f64, f64)| (p.0 - t.a.0) * nx + (p.1 - t.a.1) * ny;
    let (mut ta, mut tb) = (along(s.a), along(s.b));
    let (mut oa, mut ob) = (across(s.a), across(s.b));
    if ta > tb {
        std::mem::swap(&mut ta, &mut tb);
        std::mem::swap(&mut oa, &mut ob);
    }
    let (lo, hi) = (ta.max(0.0), tb.min(len));
    if hi <= lo {
        return None;
    }
    let offset_at = |t: f64| {
        if tb - ta < 1e-12 {
            0.5 * (oa + ob)
        } else {
            oa + (ob - oa) * (t - ta) / (tb - ta)
        }
    };
    let (o0, o1) = (offset_at(lo), offset_at(hi));
    if o0.abs().max(o1.abs()) > tol.distance {
        return None;
    }
    Some((lo, hi, 0.5 * (o0 + o1)))
}

fn union_length(mut iv: Vec<(f64, f64)>) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in iv {
        match cur {
            Some((c0, c1)) if a <= c1 => cur = Some((c0, c1.max(b))),
            Some((c0, c1)) => {
                total += c1 - c0;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((c0, c1)) = cur {
        total += c1 - c0;
    }
    total
}

fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

pub fn score(extracted: &[Seg], truth: &[TruthSegment], tol: &ScoreTolerances) -> ScoreReport {
    let truth_segs: Vec<Seg> = truth.iter().map(Seg::from).collect();
    let mut pairs = Vec::new();
    for (ti, t) in truth_segs.iter().enumerate() {
        for (si, s) in extracted.iter().enumerate() {
            if let Some((lo, hi, off)) = relate(t, s, tol) {
                pairs.push((hi - lo, ti, si, lo, hi, off));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut owner: Vec<Option<usize>> = vec![None; extracted.len()];
    let mut assigned: Vec<Vec<(usize, f64, f64, f64)>> = vec![Vec::new(); truth.len()];
    for &(_, ti, si, lo, hi, off) in &pairs {
        if owner[si].is_none() {
            owner[si] = Some(ti);
            assigned[ti].push((si, lo, hi, off));
        }
    }

    let mut coverage = Vec::with_capacity(truth.len());
    let mut matched = vec![false; truth.len()];
    let (mut pieces, mut tracks) = (0usize, 0usize);
    let (mut err_sum, mut err_n) = (0.0, 0usize);
    for (ti, t) in truth_segs.iter().enumerate() {
        let len = t.length();
        let cov = if len > 0.0 {
            union_length(assigned[ti].iter().map(|a| (a.1, a.2)).collect()) / len
        } else {
            0.0
        };
        coverage.push(cov);
        if cov + 1e-9 < tol.overlap || assigned[ti].is_empty() {
            continue;
        }
        matched[ti] = true;
        let mut groups: [Vec<usize>; 3] = Default::default();
        for &(si, _, _, off) in &assigned[ti] {
            let g = if off > tol.side_dead_zone {
                0
            } else if off < -tol.side_dead_zone {
                2
            } else {
                1
            };
            groups[g].push(si);
        }
        for g in groups.iter().filter(|g| !g.is_empty()) {
            tracks += 1;
            pieces += g.len();
            for end in [t.a, t.b] {
                let e = g
                    .iter()
                    .flat_map(|&si| [extracted[si].a, extracted[si].b])
                    .map(|p| dist(p, end))
                    .fold(f64::INFINITY, f64::min);
                err_sum += e;
                err_n += 1;
            }
        }
    }
    let matched_count = matched.iter().filter(|&&m| m).count();
    let unmatched_extracted: Vec<usize> = (0..extracted.len())
        .filter(|&si| !owner[si].is_some_and(|ti| matched[ti]))
        .collect();
    let recall = if truth.is_empty() {
        1.0
    } else {
        matched_count as f64 / truth.len() as f64
    };
    let precision = if extracted.is_empty() {
        1.0
    } else {
        (extracted.len() - unmatched_extracted.len()) as f64 / extracted.len() as f64
    };
    ScoreReport {
        recall,
        precision,
        fragmentation: if tracks > 0 {
            pieces as f64 / tracks as f64
        } else {
            0.0
        },
        endpoint_error: if err_n > 0 {
            err_sum / err_n as f64
        } else {
            0.0
        },
        truth_count: truth.len(),
        extracted_count: extracted.len(),
        matched: matched_count,
        coverage,
        unmatched_extracted,
    }
}
