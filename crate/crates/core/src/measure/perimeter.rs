//! Mollified perimeter estimates.

use crate::approx::{central_gradient, MollifierKernel};
use crate::domain::{Point, RoughSet};
use crate::error::{Error, Result};

/// Total variation of the mollified indicator, summed over the cells whose
/// centers lie in `window` (the whole grid when `None`).
///
/// `eps` must be at least two cells, and without a window the set must keep
/// `eps` plus one cell away from the grid edge.
pub fn perimeter(set: &RoughSet, eps: f64, window: Option<(Point, Point)>) -> Result<f64> {
    let g = set.grid();
    let kernel = MollifierKernel::new(g, eps)?;
    let reach = (eps / g.spacing()).ceil() as usize + 1;
    if window.is_none() && !set.has_margin(reach) {
        return Err(Error::GridTooSmall(format!("perimeter at eps {eps} needs a margin of {reach} cells")));
    }
    let w = kernel.smooth_indicator(set);
    let vol = g.cell_volume();
    let mut total = 0.0;
    for c in 0..g.cell_count() {
        if let Some((lo, hi)) = &window {
            let x = g.cell_center(c);
            if (0..g.dim()).any(|a| x[a] < lo[a] || x[a] > hi[a]) {
                continue;
            }
        }
        let d = central_gradient(g, &w, c, 0.0);
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        total += norm * vol;
    }
    Ok(total)
}

/// Perimeter by facet counting: one facet area per reduced facet.
pub fn facet_perimeter(set: &RoughSet) -> f64 {
    set.boundary_facets().len() as f64 * set.grid().facet_area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Preset;

    #[test]
    fn square_perimeter() {
        let g = Preset::Square.grid(64).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        let p = perimeter(&s, 4.0 * g.spacing(), None).unwrap();
        assert!((p - 8.0).abs() / 8.0 < 0.01, "{p}");
        assert_eq!(facet_perimeter(&s), 8.0);
    }

    #[test]
    fn eps_below_two_cells_rejected() {
        let g = Preset::Square.grid(16).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        assert!(matches!(perimeter(&s, g.spacing(), None), Err(Error::BelowResolution { .. })));
    }
}
