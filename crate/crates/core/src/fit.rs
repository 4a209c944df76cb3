//! Small least-squares helpers for convergence-order estimates.

/// Least-squares slope of `y` against `x`.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of already log-transformed pairs; kept separate so call sites read as intent.
pub fn loglog_slope(log_points: &[(f64, f64)]) -> f64 {
    slope(log_points)
}

/// Slope of `ln y` against `ln x` for positive raw pairs.
pub fn loglog_slope_raw(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    slope(&logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let pts: Vec<(f64, f64)> = (1..8).map(|i| (i as f64, 3.0 * (i as f64).powi(5))).collect();
        assert!((loglog_slope_raw(&pts) - 5.0).abs() < 1e-12);
    }
}
