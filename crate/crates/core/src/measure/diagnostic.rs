//! Whether the boundary measure stays bounded under refinement.

use serde::Serialize;

use super::boundary::star_measure;
use crate::domain::RoughSet;
use crate::error::{Error, Result};

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StarVerdict {
    Bounded,
    Growing,
}

#[derive(Clone, Debug, Serialize)]
pub struct StarRow {
    pub spacing: f64,
    pub reduced: f64,
    pub crack: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StarDiagnostic {
    pub rows: Vec<StarRow>,
    pub slope_total: f64,
    pub slope_crack: Option<f64>,
    /// Slope used for the verdict: the crack part when every level has cracks.
    pub slope: f64,
    pub verdict: StarVerdict,
}

/// Slopes above this count as growth.
pub const GROWTH_SLOPE: f64 = 0.05;

/// Fits the boundary measure of a refinement ladder against `1/spacing`.
pub fn star_condition_diagnostic(levels: &[RoughSet]) -> Result<StarDiagnostic> {
    if levels.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 levels, got {}", levels.len())));
    }
    let rows: Vec<StarRow> = levels
        .iter()
        .map(|s| {
            let total = star_measure(s);
            let crack: f64 = s.cracks().values().sum();
            StarRow { spacing: s.grid().spacing(), reduced: total - crack, crack, total }
        })
        .collect();
    let inv: Vec<f64> = rows.iter().map(|r| 1.0 / r.spacing).collect();
    let totals: Vec<f64> = rows.iter().map(|r| r.total).collect();
    let slope_total = loglog_slope(&inv, &totals);
    let slope_crack = rows.iter().all(|r| r.crack > 0.0).then(|| {
        let cracks: Vec<f64> = rows.iter().map(|r| r.crack).collect();
        loglog_slope(&inv, &cracks)
    });
    let slope = slope_crack.unwrap_or(slope_total);
    let verdict = if slope > GROWTH_SLOPE { StarVerdict::Growing } else { StarVerdict::Bounded };
    Ok(StarDiagnostic { rows, slope_total, slope_crack, slope, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.7)).collect();
        assert!((loglog_slope(&xs, &ys) - 0.7).abs() < 1e-12);
    }
}
