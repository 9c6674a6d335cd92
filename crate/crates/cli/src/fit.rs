use serde::Serialize;

/// Values at or below this are left out of exponent fits.
pub const FIT_FLOOR: f64 = 1e-6;

/// Least-squares fit of `ln c(t) = ln c₀ − rate·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub rate: f64,
    pub intercept: f64,
    pub points: usize,
    pub t_first: f64,
    pub t_last: f64,
}

/// Fits the decay rate over rows where `keep` holds and `c > FIT_FLOOR`.
/// Returns `None` with fewer than two usable points.
pub fn fit_exponent(times: &[f64], values: &[f64], keep: &[bool]) -> Option<ExponentFit> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .zip(keep)
        .filter(|((_, c), k)| **k && c.is_finite() && **c > FIT_FLOOR)
        .map(|((t, c), _)| (*t, c.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(ExponentFit {
        rate: -slope,
        intercept: my - slope * mt,
        points: pts.len(),
        t_first: pts[0].0,
        t_last: pts[pts.len() - 1].0,
    })
}
