//! Ball densities and the interior / exterior / boundary classification of cells.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Grid, Point, RoughSet};
use crate::error::{Error, Result};

/// Density class of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    /// Density one.
    Interior,
    /// Density zero.
    Exterior,
    /// Neither.
    EssBoundary,
}

/// Thresholds for [`classify`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub tau: f64,
    pub radius: f64,
    /// Whether cells beyond the grid count as part of the set.
    pub outside: bool,
}

impl ClassifyOptions {
    /// Default thresholds: `tau = 0.05` and radius eight cells.
    pub fn for_grid(grid: &Grid) -> ClassifyOptions {
        ClassifyOptions { tau: 0.05, radius: 8.0 * grid.spacing(), outside: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub labels: Vec<Label>,
    pub options: ClassifyOptions,
}

impl Classification {
    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Gray-level image: interior black, boundary gray, exterior white.
    pub fn shade(&self, cell: usize) -> u8 {
        match self.labels[cell] {
            Label::Interior => 0,
            Label::EssBoundary => 128,
            Label::Exterior => 255,
        }
    }
}

/// Fraction of cells with center in `B(x, r)` that belong to the set.
///
/// Normalizing by the discrete ball count makes complementary densities sum to one.
pub fn density(set: &RoughSet, x: &Point, r: f64) -> Result<f64> {
    let g = set.grid();
    let h = g.spacing();
    if r < 4.0 * h * (1.0 - 1e-12) {
        return Err(Error::BelowResolution { radius: r, limit: 4.0 * h });
    }
    let (inside, total) = ball_count(set, x, r, None).ok_or(Error::BallOutsideGrid(r))?;
    Ok(inside as f64 / total as f64)
}

/// Counts set cells and all cells with center in `B(x, r)`.
/// With `outside = None` a ball leaving the grid yields `None`; otherwise the
/// missing cells count with the given membership.
pub(crate) fn ball_count(set: &RoughSet, x: &Point, r: f64, outside: Option<bool>) -> Option<(usize, usize)> {
    let g = set.grid();
    let h = g.spacing();
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for a in 0..g.dim() {
        let t = (x[a] - g.origin()[a]) / h - 0.5;
        lo[a] = (t - r / h).ceil() as i64;
        hi[a] = (t + r / h).floor() as i64;
    }
    let r2 = r * r;
    let (mut inside, mut total) = (0usize, 0usize);
    for k in lo[2]..=hi[2] {
        for j in lo[1]..=hi[1] {
            for i in lo[0]..=hi[0] {
                let mut c = [0.0; 3];
                let m = [i, j, k];
                for a in 0..g.dim() {
                    c[a] = g.origin()[a] + (m[a] as f64 + 0.5) * h;
                }
                if crate::domain::dist2(&c, x) > r2 {
                    continue;
                }
                total += 1;
                match g.cell_at(m) {
                    Some(idx) => inside += set.contains(idx) as usize,
                    None => match outside {
                        Some(v) => inside += v as usize,
                        None => return None,
                    },
                }
            }
        }
    }
    Some((inside, total))
}

/// Labels every cell by its density at radius `options.radius`.
///
/// A cell whose `3^n` neighbourhood lies entirely inside (outside) the set is
/// interior (exterior) outright, and cells next to a crack are interior.
pub fn classify(set: &RoughSet, options: &ClassifyOptions) -> Result<Classification> {
    let g = set.grid();
    let h = g.spacing();
    if options.radius < 4.0 * h * (1.0 - 1e-12) {
        return Err(Error::BelowResolution { radius: options.radius, limit: 4.0 * h });
    }
    if !(0.0..0.5).contains(&options.tau) {
        return Err(Error::InvalidArgument(format!("tau {} must lie in [0, 1/2)", options.tau)));
    }
    let offsets = g.ball_offsets(options.radius);
    let n = offsets.len() as f64;
    let near: Vec<[i64; 3]> = g.ball_offsets(1.8 * h);
    let member = |m: [i64; 3]| g.cell_at(m).map_or(options.outside, |i| set.contains(i));
    let labels = (0..g.cell_count())
        .into_par_iter()
        .map(|c| {
            let m = g.cell_multi(c);
            let base = [m[0] as i64, m[1] as i64, m[2] as i64];
            let shift = |o: &[i64; 3]| [base[0] + o[0], base[1] + o[1], base[2] + o[2]];
            let here = set.contains(c);
            if near.iter().all(|o| member(shift(o)) == here) {
                return if here { Label::Interior } else { Label::Exterior };
            }
            if here && g.cell_faces(c).any(|fs| set.is_crack(fs.facet)) {
                return Label::Interior;
            }
            let count = offsets.iter().filter(|o| member(shift(o))).count() as f64;
            if n - count <= options.tau * n {
                Label::Interior
            } else if count <= options.tau * n {
                Label::Exterior
            } else {
                Label::EssBoundary
            }
        })
        .collect();
    Ok(Classification { labels, options: *options })
}

/// Density of the set around the center of a facet.
pub fn facet_density(set: &RoughSet, f: crate::domain::Facet, r: f64, outside: bool) -> f64 {
    let (i, t) = ball_count(set, &set.grid().facet_center(f), r, Some(outside)).expect("outside given");
    i as f64 / t as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Preset, Side};

    #[test]
    fn deep_interior_has_density_one() {
        let g = Preset::Square.grid(32).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        assert_eq!(density(&s, &[0.0, 0.0, 0.0], 0.25).unwrap(), 1.0);
    }

    #[test]
    fn halfspace_density_is_half() {
        let g = crate::domain::Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], 1.0 / 32.0, 12).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        assert_eq!(density(&s, &[1.0, 0.0, 0.0], 0.25).unwrap(), 0.5);
    }

    #[test]
    fn small_radius_rejected() {
        let g = Preset::Square.grid(32).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        let r = 3.0 * g.spacing();
        assert!(matches!(density(&s, &[0.0; 3], r), Err(Error::BelowResolution { .. })));
        assert!(matches!(density(&s, &[1.0, 1.0, 0.0], 1.0), Err(Error::BallOutsideGrid(_))));
    }

    #[test]
    fn slit_cells_are_interior() {
        let g = Preset::SlitSquare.grid(16).unwrap();
        let s = Preset::SlitSquare.rasterize(&g).unwrap();
        let cls = classify(&s, &ClassifyOptions::for_grid(&g)).unwrap();
        for f in s.cracks().keys() {
            for side in [Side::Lower, Side::Upper] {
                assert_eq!(cls.labels[g.facet_cell(*f, side).unwrap()], Label::Interior);
            }
        }
        let corner = g.cell_index([crate::domain::PRESET_MARGIN, crate::domain::PRESET_MARGIN, 0]);
        assert_eq!(cls.labels[corner], Label::EssBoundary);
    }
}
