//! Greedy non-maxima suppression on square grids.

/// Peaks of a `g × g` row-major grid in decreasing value order. Each taken
/// peak zeroes its `(2s+1)²` neighbourhood; ties go to the first cell in
/// row-major order. Stops at the first maximum below `min_value` (or zero).
pub fn non_maxima_suppression(
    grid: &[u32],
    g: usize,
    radius: usize,
    min_value: u32,
) -> Vec<(usize, usize, u32)> {
    let mut work = grid.to_vec();
    let mut peaks = Vec::new();
    loop {
        let mut best = (0usize, 0u32);
        for (k, &v) in work.iter().enumerate() {
            if v > best.1 {
                best = (k, v);
            }
        }
        if best.1 == 0 || best.1 < min_value {
            return peaks;
        }
        let (i, j) = (best.0 % g, best.0 / g);
        peaks.push((i, j, best.1));
        for jj in j.saturating_sub(radius)..=(j + radius).min(g - 1) {
            for ii in i.saturating_sub(radius)..=(i + radius).min(g - 1) {
                work[jj * g + ii] = 0;
            }
        }
    }
}
