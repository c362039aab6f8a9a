//! Interior approximations across scales and refinement levels.

use serde::Serialize;

use super::approximate::interior_approximation;
use crate::domain::RoughSet;
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::measure::{loglog_slope, GROWTH_SLOPE};

/// One refinement level and the scales to run on it.
#[derive(Clone, Debug)]
pub struct SweepLevel {
    pub set: RoughSet,
    pub deltas: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub level: usize,
    pub delta: f64,
    pub spacing: f64,
    pub perimeter: f64,
    pub removed_volume: f64,
    pub boundary_measure: f64,
    pub ratio: f64,
    pub audit_passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SweepVerdict {
    /// Ratios stay within a factor of four.
    Bounded,
    /// The smallest perimeter per level keeps increasing, and has not slowed down at the finest levels.
    Growing,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Smallest perimeter over the scales of each level.
    pub min_perimeters: Vec<f64>,
    /// Log-log slope of `min_perimeters` against `1/spacing`.
    pub perimeter_slope: f64,
    /// Log-log slope of the removed volume against `delta` over all rows.
    pub removed_slope: f64,
    /// Largest ratio over smallest ratio.
    pub ratio_spread: f64,
    pub audits_passed: bool,
    pub verdict: SweepVerdict,
}

/// Largest allowed spread of the ratios for a bounded verdict.
pub const BOUNDED_SPREAD: f64 = 4.0;

/// Runs [`interior_approximation`] on every level at every scale of that level.
pub fn approximation_sweep(levels: &[SweepLevel]) -> Result<SweepReport> {
    let count: usize = levels.iter().map(|l| l.deltas.len()).sum();
    if count < 3 {
        return Err(Error::InvalidArgument(format!("a sweep needs at least 3 scales, got {count}")));
    }
    let mut rows = Vec::with_capacity(count);
    for (level, l) in levels.iter().enumerate() {
        for &delta in &l.deltas {
            let r = interior_approximation(&l.set, delta)?;
            rows.push(SweepRow {
                level,
                delta,
                spacing: r.spacing,
                perimeter: r.perimeter,
                removed_volume: r.removed_volume,
                boundary_measure: r.boundary_measure,
                ratio: r.ratio,
                audit_passed: r.audit.passed(),
            });
        }
    }
    let min_perimeters: Vec<f64> = (0..levels.len())
        .map(|k| rows.iter().filter(|r| r.level == k).map(|r| r.perimeter).fold(f64::INFINITY, f64::min))
        .collect();
    let inverse: Vec<f64> = levels.iter().map(|l| 1.0 / l.set.grid().spacing()).collect();
    let perimeter_slope = if levels.len() >= 2 { loglog_slope(&inverse, &min_perimeters) } else { 0.0 };
    let deltas: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let removed: Vec<f64> = rows.iter().map(|r| r.removed_volume).collect();
    let removed_slope = loglog_slope(&deltas, &removed);
    let ratio_max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let ratio_min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let ratio_spread = ratio_max / ratio_min;
    let increments: Vec<f64> = min_perimeters.windows(2).map(|w| w[1] - w[0]).collect();
    let growing = levels.len() >= 3
        && increments.iter().all(|&d| d > 0.0)
        && increments[increments.len() - 1] >= 0.75 * increments[increments.len() - 2]
        && perimeter_slope >= GROWTH_SLOPE;
    let verdict = if growing {
        SweepVerdict::Growing
    } else if ratio_spread <= BOUNDED_SPREAD {
        SweepVerdict::Bounded
    } else {
        SweepVerdict::Inconclusive
    };
    let audits_passed = rows.iter().all(|r| r.audit_passed);
    Ok(SweepReport { rows, min_perimeters, perimeter_slope, removed_slope, ratio_spread, audits_passed, verdict })
}

impl SweepReport {
    /// `delta,spacing,perimeter,removed,ratio,verdict` rows.
    pub fn to_csv(&self) -> String {
        let verdict = match self.verdict {
            SweepVerdict::Bounded => "BOUNDED",
            SweepVerdict::Growing => "GROWING",
            SweepVerdict::Inconclusive => "INCONCLUSIVE",
        };
        let mut out = String::from("delta,spacing,perimeter,removed,ratio,verdict\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(r.delta),
                fmt_f64(r.spacing),
                fmt_f64(r.perimeter),
                fmt_f64(r.removed_volume),
                fmt_f64(r.ratio),
                verdict
            ));
        }
        out
    }
}
