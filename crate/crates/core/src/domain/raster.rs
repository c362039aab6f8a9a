//! Rasterization of domain descriptions onto grids.

use rayon::prelude::*;

use super::grid::{Facet, Grid, Side};
use super::set::RoughSet;
use super::spec::{Crack, DomainSpec};
use crate::error::{Error, Result};

/// Rasterizes `spec` onto `grid`: a cell belongs to the set when its center
/// lies inside the shape, and cracks snap to staircases of grid facets.
///
/// The grid must cover the shape's bounding box with at least one cell to spare.
pub fn rasterize(spec: &DomainSpec, grid: &Grid) -> Result<RoughSet> {
    if spec.dim != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "domain of dimension {} on a grid of dimension {}",
            spec.dim,
            grid.dim()
        )));
    }
    let (lo, hi) = spec.shape.bounds();
    let top = grid.upper_corner();
    let h = grid.spacing();
    let tol = 1e-9 * h;
    for a in 0..grid.dim() {
        if lo[a] - h < grid.origin()[a] - tol || hi[a] + h > top[a] + tol {
            return Err(Error::GridTooSmall(format!(
                "shape spans [{}, {}] along axis {a} but the grid leaves no margin cell",
                lo[a], hi[a]
            )));
        }
    }
    let cells: Vec<bool> = (0..grid.cell_count())
        .into_par_iter()
        .map(|c| spec.shape.contains(&grid.cell_center(c)))
        .collect();
    let mut set = RoughSet::new(grid.clone(), cells)?;
    for crack in &spec.cracks {
        let facets = match crack {
            Crack::Segment { from, to } => snap_segment(grid, *from, *to)?,
            Crack::Rect { .. } => snap_rect(grid, crack)?,
        };
        let kept = trim(&set, facets, crack)?;
        let per_facet = crack.measure() * kept.1 / kept.0.len() as f64;
        set.add_cracks(kept.0.into_iter().map(|f| (f, per_facet)))?;
    }
    Ok(set)
}

/// Staircase of facets approximating a segment, walking grid edges between
/// the snapped endpoints and always stepping toward the true line.
pub fn snap_segment(grid: &Grid, from: [f64; 2], to: [f64; 2]) -> Result<Vec<Facet>> {
    let h = grid.spacing();
    let o = grid.origin();
    let p = [(from[0] - o[0]) / h, (from[1] - o[1]) / h];
    let q = [(to[0] - o[0]) / h, (to[1] - o[1]) / h];
    let a = [p[0].round() as i64, p[1].round() as i64];
    let b = [q[0].round() as i64, q[1].round() as i64];
    if a == b {
        return Err(Error::GridTooCoarse(format!(
            "crack from {from:?} to {to:?} is shorter than one cell of size {h}"
        )));
    }
    let (nx, ny) = (grid.extent(0) as i64, grid.extent(1) as i64);
    let in_range = |v: [i64; 2]| v[0] >= 0 && v[1] >= 0 && v[0] <= nx && v[1] <= ny;
    if !in_range(a) || !in_range(b) {
        return Err(Error::CrackOutsideBody(format!("crack from {from:?} to {to:?} leaves the grid")));
    }
    let d = [q[0] - p[0], q[1] - p[1]];
    let off_line = |v: [i64; 2]| (d[0] * (v[1] as f64 - p[1]) - d[1] * (v[0] as f64 - p[0])).abs();
    let step = [(b[0] - a[0]).signum(), (b[1] - a[1]).signum()];
    let mut cur = a;
    let mut out = Vec::new();
    while cur != b {
        let try_x = (cur[0] != b[0]).then(|| [cur[0] + step[0], cur[1]]);
        let try_y = (cur[1] != b[1]).then(|| [cur[0], cur[1] + step[1]]);
        let next = match (try_x, try_y) {
            (Some(x), Some(y)) => {
                if off_line(y) < off_line(x) {
                    y
                } else {
                    x
                }
            }
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => unreachable!(),
        };
        let f = if next[1] == cur[1] {
            grid.facet(1, [cur[0].min(next[0]) as usize, cur[1] as usize, 0])
        } else {
            grid.facet(0, [cur[0] as usize, cur[1].min(next[1]) as usize, 0])
        };
        out.push(f);
        cur = next;
    }
    Ok(out)
}

/// Facets of the plane of a flat rectangle whose centers fall inside it.
fn snap_rect(grid: &Grid, crack: &Crack) -> Result<Vec<Facet>> {
    let Crack::Rect { corner, opposite } = crack else {
        unreachable!()
    };
    let axis = crack.flat_axis().expect("validated at parse time");
    let h = grid.spacing();
    let o = grid.origin();
    let plane = ((corner[axis] - o[axis]) / h).round();
    if plane < 0.0 || plane > grid.extent(axis) as f64 {
        return Err(Error::CrackOutsideBody("rectangle crack plane leaves the grid".into()));
    }
    let mut out = Vec::new();
    let fe = grid.facet_extents(axis);
    for k in 0..fe[2] {
        for j in 0..fe[1] {
            for i in 0..fe[0] {
                let base = [i, j, k];
                if base[axis] != plane as usize {
                    continue;
                }
                let f = grid.facet(axis, base);
                let c = grid.facet_center(f);
                let inside = (0..3).filter(|&a| a != axis).all(|a| {
                    let (lo, hi) = (corner[a].min(opposite[a]), corner[a].max(opposite[a]));
                    c[a] >= lo && c[a] <= hi
                });
                if inside {
                    out.push(f);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::GridTooCoarse("rectangle crack covers no facet center".into()));
    }
    Ok(out)
}

/// Drops facets at the ends of a staircase that touch non-set cells; any
/// such facet in the middle is an error. Returns kept facets and the kept fraction.
fn trim(set: &RoughSet, facets: Vec<Facet>, crack: &Crack) -> Result<(Vec<Facet>, f64)> {
    let g = set.grid();
    let ok = |f: &Facet| {
        set.contains_opt(g.facet_cell(*f, Side::Lower)) && set.contains_opt(g.facet_cell(*f, Side::Upper))
    };
    let total = facets.len();
    let kept: Vec<Facet> = match crack {
        Crack::Rect { .. } => facets.into_iter().filter(ok).collect(),
        Crack::Segment { .. } => {
            let first = facets.iter().position(ok);
            let last = facets.iter().rposition(ok);
            match (first, last) {
                (Some(s), Some(e)) => {
                    if let Some(bad) = facets[s..=e].iter().find(|f| !ok(f)) {
                        return Err(Error::CrackOutsideBody(format!(
                            "crack {crack:?} crosses the boundary at facet axis {} index {}",
                            bad.axis, bad.index
                        )));
                    }
                    facets[s..=e].to_vec()
                }
                _ => Vec::new(),
            }
        }
    };
    if kept.is_empty() {
        return Err(Error::CrackOutsideBody(format!("crack {crack:?} lies outside the body")));
    }
    let frac = kept.len() as f64 / total as f64;
    Ok((kept, frac))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::spec::Shape;

    fn unit_square() -> DomainSpec {
        DomainSpec::new(Shape::Box { min: [0.0, 0.0, 0.0], max: [1.0, 1.0, 0.0] }, 2)
    }

    #[test]
    fn unit_square_quarter_grid() {
        let g = Grid::covering(&[0.0, 0.0], &[1.0, 1.0], 0.25, 1).unwrap();
        let s = rasterize(&unit_square(), &g).unwrap();
        assert_eq!(s.count(), 16);
    }

    #[test]
    fn tight_grid_is_rejected() {
        let g = Grid::covering(&[0.0, 0.0], &[1.0, 1.0], 0.25, 0).unwrap();
        assert!(matches!(rasterize(&unit_square(), &g), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn staircase_is_connected() {
        let g = Grid::new(0.1, &[0.0, 0.0], &[20, 20]).unwrap();
        let f = snap_segment(&g, [0.3, 0.2], [1.5, 0.9]).unwrap();
        assert_eq!(f.len(), 12 + 7);
        let ax = f.iter().filter(|x| x.axis == 1).count();
        assert_eq!(ax, 12);
    }

    #[test]
    fn slanted_crack_keeps_true_length() {
        let spec = unit_square().with_crack(Crack::Segment { from: [0.2, 0.2], to: [0.8, 0.8] });
        let g = Grid::covering(&[0.0, 0.0], &[1.0, 1.0], 1.0 / 64.0, 1).unwrap();
        let s = rasterize(&spec, &g).unwrap();
        let total: f64 = s.cracks().values().sum();
        assert!((total - 0.6 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn crack_through_boundary_is_error() {
        let spec = DomainSpec::new(
            Shape::Diff(vec![
                Shape::Box { min: [0.0, 0.0, 0.0], max: [1.0, 1.0, 0.0] },
                Shape::Box { min: [0.4, 0.0, 0.0], max: [0.6, 0.75, 0.0] },
            ]),
            2,
        )
        .with_crack(Crack::Segment { from: [0.1, 0.5], to: [0.9, 0.5] });
        let g = Grid::covering(&[0.0, 0.0], &[1.0, 1.0], 1.0 / 32.0, 1).unwrap();
        assert!(matches!(rasterize(&spec, &g), Err(Error::CrackOutsideBody(_))));
    }

    #[test]
    fn rect_crack_in_3d() {
        let spec = DomainSpec::new(Shape::Box { min: [0.0; 3], max: [1.0; 3] }, 3).with_crack(Crack::Rect {
            corner: [0.0, 0.0, 0.5],
            opposite: [1.0, 1.0, 0.5],
        });
        let g = Grid::covering(&[0.0; 3], &[1.0; 3], 0.25, 1).unwrap();
        let s = rasterize(&spec, &g).unwrap();
        assert_eq!(s.cracks().len(), 16);
        assert!((s.cracks().values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
