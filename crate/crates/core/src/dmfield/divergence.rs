//! Divergence measures and the extension of fields by zero.

use rayon::prelude::*;

use super::field::FluxField;
use super::signed::SignedMeasure;
use crate::domain::{FacetKind, Grid, RoughSet, Side};
use crate::error::{Error, Result};

pub(crate) fn check_grid(field: &FluxField, set: &RoughSet) -> Result<()> {
    if field.grid() != set.grid() {
        return Err(Error::GridMismatch("field and set live on different grids".into()));
    }
    Ok(())
}

/// Divergence of `field` inside `set`: one atom per set cell equal to its
/// net outgoing flux. Jumps across cracks and the boundary are not part of it.
pub fn divergence_measure(field: &FluxField, set: &RoughSet) -> Result<SignedMeasure> {
    check_grid(field, set)?;
    let g = set.grid();
    let area = g.facet_area();
    let atoms: Vec<(usize, f64)> = (0..g.cell_count())
        .into_par_iter()
        .filter(|&c| set.contains(c))
        .map(|c| (c, field.cell_balance(c) * area))
        .collect();
    let mut m = SignedMeasure::default();
    for (c, w) in atoms {
        m.add_cell(c, w);
    }
    Ok(m)
}

/// Divergence of `field` on its whole grid, with the field read as zero
/// beyond the grid: cell balances plus jump atoms on two-sided and edge facets.
pub fn divergence_measure_full(field: &FluxField) -> SignedMeasure {
    let g = field.grid();
    let area = g.facet_area();
    let mut m = SignedMeasure::default();
    let balances: Vec<f64> = (0..g.cell_count()).into_par_iter().map(|c| field.cell_balance(c)).collect();
    for (c, b) in balances.into_iter().enumerate() {
        m.add_cell(c, b * area);
    }
    for f in g.all_facets() {
        let lo = g.facet_cell(f, Side::Lower).map_or(0.0, |_| field.side_value(f, Side::Lower));
        let up = g.facet_cell(f, Side::Upper).map_or(0.0, |_| field.side_value(f, Side::Upper));
        m.add_facet(f, (up - lo) * area);
    }
    m
}

/// Extends a field on `set` by zero to the lattice-aligned grid `bbox`, which
/// must contain every set cell with at least one cell to spare.
/// Returns the extended field and the set re-gridded onto `bbox`.
pub fn extend_by_zero(field: &FluxField, set: &RoughSet, bbox: &Grid) -> Result<(FluxField, RoughSet)> {
    check_grid(field, set)?;
    let inner = set.embed(bbox)?;
    if !inner.has_margin(1) {
        return Err(Error::GridTooSmall("the box must strictly contain the set".into()));
    }
    let off = set.grid().offset_in(bbox)?;
    let back = [-off[0], -off[1], -off[2]];
    let mut out = FluxField::zeros_for(&inner);
    out.set_sup_bound(field.sup_bound());
    for f in bbox.all_facets() {
        let kind = inner.facet_kind(f);
        if kind == FacetKind::Exterior {
            continue;
        }
        let src = bbox
            .translate_facet(f, set.grid(), back)
            .ok_or_else(|| Error::GridTooSmall("set facet outside its own grid".into()))?;
        match kind {
            FacetKind::Interior => out.set_value(f, field.side_value(src, Side::Lower)),
            FacetKind::Crack => {
                for s in [Side::Lower, Side::Upper] {
                    out.set_side(f, s, field.side_value(src, s));
                }
            }
            FacetKind::Boundary { inside } => out.set_side(f, inside, field.side_value(src, inside)),
            FacetKind::Exterior => unreachable!(),
        }
    }
    Ok((out, inner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmfield::sample_field;
    use crate::domain::Preset;

    #[test]
    fn constant_field_is_divergence_free_inside() {
        let g = Preset::Disk.grid(16).unwrap();
        let s = Preset::Disk.rasterize(&g).unwrap();
        let f = sample_field(|_| [0.3, -0.2, 0.0], &s, 1.0).unwrap();
        let d = divergence_measure(&f, &s).unwrap();
        assert!(d.total_variation() < 1e-14);
    }

    #[test]
    fn full_divergence_has_zero_total() {
        let g = Preset::SlitSquare.grid(8).unwrap();
        let s = Preset::SlitSquare.rasterize(&g).unwrap();
        let f = crate::dmfield::random_field(&s, 3, 1.0);
        let (ext, _) = extend_by_zero(&f, &s, &g).unwrap();
        assert!(divergence_measure_full(&ext).total().abs() < 1e-12);
    }

    #[test]
    fn box_must_contain_set() {
        let g = Preset::Square.grid(8).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        let f = sample_field(|_| [1.0, 0.0, 0.0], &s, 1.0).unwrap();
        let tight = Grid::new(g.spacing(), &[-1.0, -1.0], &[16, 16]).unwrap();
        assert!(extend_by_zero(&f, &s, &tight).is_err());
    }
}
