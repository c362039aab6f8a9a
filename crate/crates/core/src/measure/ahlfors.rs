//! Upper Ahlfors regularity constants of weighted facet sets.

use std::collections::HashMap;

use serde::Serialize;

use crate::domain::{dist2, Facet, Grid, Point};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct AhlforsReport {
    /// Largest observed `mass(B(x, r)) / r^(n-1)`.
    pub constant: f64,
    pub center: Point,
    pub radius: f64,
    pub samples: usize,
}

/// Samples every k-th facet center (lexicographic order) so that about
/// `samples` centers are used, then maximizes over centers and radii.
pub fn ahlfors_constant(grid: &Grid, facets: &[(Facet, f64)], samples: usize, radii: &[f64]) -> Result<AhlforsReport> {
    if facets.is_empty() || samples == 0 {
        return Err(Error::InvalidArgument("need at least one facet and one sample".into()));
    }
    let stride = facets.len().div_ceil(samples);
    let centers: Vec<Point> = facets.iter().step_by(stride).map(|(f, _)| grid.facet_center(*f)).collect();
    ahlfors_constant_at(grid, facets, &centers, radii)
}

/// Maximum of `mass(B(x, r)) / r^(n-1)` over explicit centers and radii; a
/// facet counts when its center lies in the closed ball.
pub fn ahlfors_constant_at(grid: &Grid, facets: &[(Facet, f64)], centers: &[Point], radii: &[f64]) -> Result<AhlforsReport> {
    let h = grid.spacing();
    if let Some(&r) = radii.iter().find(|&&r| r < 4.0 * h * (1.0 - 1e-12)) {
        return Err(Error::BelowResolution { radius: r, limit: 4.0 * h });
    }
    let bucket = radii.iter().cloned().fold(0.0, f64::max);
    if bucket <= 0.0 || centers.is_empty() {
        return Err(Error::InvalidArgument("need at least one center and one radius".into()));
    }
    let dim = grid.dim();
    let key = |p: &Point| {
        let mut k = [0i64; 3];
        for a in 0..dim {
            k[a] = (p[a] / bucket).floor() as i64;
        }
        k
    };
    let points: Vec<(Point, f64)> = facets.iter().map(|(f, w)| (grid.facet_center(*f), *w)).collect();
    let mut table: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, (p, _)) in points.iter().enumerate() {
        table.entry(key(p)).or_default().push(i);
    }
    let span = |a: usize| if a < dim { -1..=1 } else { 0..=0 };
    let mut best = AhlforsReport { constant: 0.0, center: centers[0], radius: radii[0], samples: centers.len() };
    for x in centers {
        let k0 = key(x);
        for &r in radii {
            let mut mass = 0.0;
            for dk in span(2) {
                for dj in span(1) {
                    for di in span(0) {
                        let Some(list) = table.get(&[k0[0] + di, k0[1] + dj, k0[2] + dk]) else {
                            continue;
                        };
                        for &i in list {
                            if dist2(&points[i].0, x) <= r * r * (1.0 + 1e-12) {
                                mass += points[i].1;
                            }
                        }
                    }
                }
            }
            let ratio = mass / r.powi(dim as i32 - 1);
            if ratio > best.constant {
                best = AhlforsReport { constant: ratio, center: *x, radius: r, samples: centers.len() };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Preset;
    use crate::measure::star_facets;

    #[test]
    fn straight_crack_constant_two() {
        let g = Preset::SlitSquare.grid(64).unwrap();
        let s = Preset::SlitSquare.rasterize(&g).unwrap();
        let crack: Vec<(Facet, f64)> = s.cracks().iter().map(|(&f, &w)| (f, w)).collect();
        let centers = [[0.0, 0.0, 0.0]];
        let r = 16.0 * g.spacing();
        let rep = ahlfors_constant_at(&g, &crack, &centers, &[r]).unwrap();
        assert!((rep.constant - 2.0).abs() < 1e-12);
        let all = star_facets(&s);
        assert!(ahlfors_constant(&g, &all, 40, &[r, 2.0 * r]).unwrap().constant >= 2.0);
    }
}
