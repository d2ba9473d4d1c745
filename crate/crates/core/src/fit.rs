//! Weighted total-least-squares line fitting.

/// Line through a weighted point cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub cx: f64,
    pub cy: f64,
    /// Orientation of the line in `[0°, 180°)`.
    pub angle_deg: f64,
    /// Weighted sum of squared orthogonal residuals.
    pub residual: f64,
}

/// Fit of `(x, y, weight)` points minimizing the weighted squared orthogonal
/// distance. `None` when the total weight is zero or the points have no
/// spread.
pub fn weighted_tls(points: &[(f64, f64, f64)]) -> Option<LineFit> {
    let wsum: f64 = points.iter().map(|p| p.2).sum();
    if !(wsum > 0.0) {
        return None;
    }
    let cx = points.iter().map(|p| p.2 * p.0).sum::<f64>() / wsum;
    let cy = points.iter().map(|p| p.2 * p.1).sum::<f64>() / wsum;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y, w) in points {
        let (dx, dy) = (x - cx, y - cy);
        sxx += w * dx * dx;
        syy += w * dy * dy;
        sxy += w * dx * dy;
    }
    let scale = sxx + syy;
    if scale <= 1e-12 * wsum {
        return None;
    }
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut angle_deg = phi.to_degrees().rem_euclid(180.0);
    if angle_deg >= 180.0 {
        angle_deg -= 180.0;
    }
    // smaller eigenvalue of the scatter matrix
    let half_trace = 0.5 * scale;
    let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let residual = (half_trace - disc).max(0.0);
    Some(LineFit {
        cx,
        cy,
        angle_deg,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: Vec<_> = (0..10)
            .map(|i| (i as f64, 2.0 * i as f64 + 1.0, 1.0))
            .collect();
        let f = weighted_tls(&pts).unwrap();
        assert!((f.angle_deg - 2f64.atan().to_degrees()).abs() < 1e-9);
        assert!(f.residual < 1e-9);
    }

    #[test]
    fn weight_scale_invariance() {
        let pts = [(0.0, 0.0, 1.0), (10.0, 0.5, 2.0), (20.0, -0.5, 3.0)];
        let twice: Vec<_> = pts.iter().map(|&(x, y, w)| (x, y, 2.0 * w)).collect();
        let a = weighted_tls(&pts).unwrap();
        let b = weighted_tls(&twice).unwrap();
        assert!((a.angle_deg - b.angle_deg).abs() < 1e-12);
        assert!((a.cx - b.cx).abs() < 1e-12 && (a.cy - b.cy).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(weighted_tls(&[]).is_none());
        assert!(weighted_tls(&[(1.0, 1.0, 1.0), (1.0, 1.0, 3.0)]).is_none());
        assert!(weighted_tls(&[(1.0, 1.0, 0.0), (2.0, 1.0, 0.0)]).is_none());
    }

    #[test]
    fn vertical_line() {
        let pts: Vec<_> = (0..5).map(|i| (3.0, i as f64, 1.0)).collect();
        assert!((weighted_tls(&pts).unwrap().angle_deg - 90.0).abs() < 1e-9);
    }
}
