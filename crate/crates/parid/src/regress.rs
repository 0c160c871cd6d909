//! Least-squares line fitting used by the slope diagnostics.

/// Slope of the least-squares line through `points`.
pub(crate) fn slope(points: &[(f64, f64)]) -> f64 {
    debug_assert!(points.len() >= 2);
    let n = points.len() as f64;
    let mx: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
