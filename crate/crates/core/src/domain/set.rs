//! Rasterized domains: a cell indicator plus a set of crack facets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::grid::{Facet, FacetSide, Grid, Side};
use crate::error::{Error, Result};

/// How a facet relates to a [`RoughSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FacetKind {
    /// Both cells are in the set and the facet is not a crack.
    Interior,
    /// Both cells are in the set and the facet is a crack.
    Crack,
    /// Exactly one cell is in the set; `inside` names its side.
    Boundary { inside: Side },
    /// Neither cell is in the set.
    Exterior,
}

/// A bounded open set on a grid, with internal cracks.
///
/// Every crack facet has set cells on both of its sides. Crack facets carry a
/// Hausdorff weight so that snapped slanted cracks keep their true length.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoughSet {
    grid: Grid,
    cells: Vec<bool>,
    cracks: BTreeMap<Facet, f64>,
    #[serde(skip)]
    crack_mask: Vec<Vec<bool>>,
}

impl PartialEq for RoughSet {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.cells == other.cells && self.cracks == other.cracks
    }
}

impl RoughSet {
    pub fn new(grid: Grid, cells: Vec<bool>) -> Result<RoughSet> {
        if cells.len() != grid.cell_count() {
            return Err(Error::GridMismatch(format!(
                "{} cell values for a grid of {} cells",
                cells.len(),
                grid.cell_count()
            )));
        }
        let crack_mask = (0..grid.dim()).map(|a| vec![false; grid.facet_count(a)]).collect();
        Ok(RoughSet { grid, cells, cracks: BTreeMap::new(), crack_mask })
    }

    pub fn from_predicate(grid: Grid, inside: impl Fn(usize) -> bool) -> RoughSet {
        let cells = (0..grid.cell_count()).map(inside).collect();
        RoughSet::new(grid, cells).expect("cell count matches grid")
    }

    /// Adds crack facets with their Hausdorff weights.
    pub fn add_cracks(&mut self, facets: impl IntoIterator<Item = (Facet, f64)>) -> Result<()> {
        for (f, w) in facets {
            if !self.both_sides_inside(f) {
                return Err(Error::CrackOutsideBody(format!(
                    "facet axis {} index {} does not separate two set cells",
                    f.axis, f.index
                )));
            }
            self.crack_mask[f.axis as usize][f.index] = true;
            self.cracks.entry(f).or_insert(w);
        }
        Ok(())
    }

    pub fn with_cracks(mut self, facets: impl IntoIterator<Item = (Facet, f64)>) -> Result<RoughSet> {
        self.add_cracks(facets)?;
        Ok(self)
    }

    /// Rebuilds the crack lookup table after deserialization.
    pub fn rebuild_index(&mut self) {
        self.crack_mask = (0..self.grid.dim()).map(|a| vec![false; self.grid.facet_count(a)]).collect();
        for f in self.cracks.keys() {
            self.crack_mask[f.axis as usize][f.index] = true;
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.cells[cell]
    }

    /// Indicator of an optional cell, with `None` treated as outside.
    pub fn contains_opt(&self, cell: Option<usize>) -> bool {
        cell.is_some_and(|c| self.cells[c])
    }

    pub fn is_crack(&self, f: Facet) -> bool {
        self.crack_mask[f.axis as usize][f.index]
    }

    /// Crack facets in lexicographic order with their Hausdorff weights.
    pub fn cracks(&self) -> &BTreeMap<Facet, f64> {
        &self.cracks
    }

    pub fn has_cracks(&self) -> bool {
        !self.cracks.is_empty()
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn volume(&self) -> f64 {
        self.count() as f64 * self.grid.cell_volume()
    }

    fn both_sides_inside(&self, f: Facet) -> bool {
        self.contains_opt(self.grid.facet_cell(f, Side::Lower))
            && self.contains_opt(self.grid.facet_cell(f, Side::Upper))
    }

    pub fn facet_kind(&self, f: Facet) -> FacetKind {
        let lo = self.contains_opt(self.grid.facet_cell(f, Side::Lower));
        let up = self.contains_opt(self.grid.facet_cell(f, Side::Upper));
        match (lo, up) {
            (true, true) if self.is_crack(f) => FacetKind::Crack,
            (true, true) => FacetKind::Interior,
            (true, false) => FacetKind::Boundary { inside: Side::Lower },
            (false, true) => FacetKind::Boundary { inside: Side::Upper },
            (false, false) => FacetKind::Exterior,
        }
    }

    /// Facets separating set cells from non-set cells, in lexicographic order,
    /// with the side of the set cell.
    pub fn boundary_facets(&self) -> Vec<(Facet, Side)> {
        self.grid
            .all_facets()
            .filter_map(|f| match self.facet_kind(f) {
                FacetKind::Boundary { inside } => Some((f, inside)),
                _ => None,
            })
            .collect()
    }

    /// Facets whose two sides may carry different values: cracks and boundary facets.
    pub fn two_sided_facets(&self) -> Vec<Facet> {
        self.grid
            .all_facets()
            .filter(|&f| matches!(self.facet_kind(f), FacetKind::Crack | FacetKind::Boundary { .. }))
            .collect()
    }

    /// Facet sides seen from inside the set across the boundary or a crack.
    pub fn inner_sides(&self) -> Vec<FacetSide> {
        let mut out = Vec::new();
        for f in self.grid.all_facets() {
            match self.facet_kind(f) {
                FacetKind::Boundary { inside } => out.push(FacetSide::new(f, inside)),
                FacetKind::Crack => {
                    out.push(FacetSide::new(f, Side::Lower));
                    out.push(FacetSide::new(f, Side::Upper));
                }
                _ => {}
            }
        }
        out
    }

    /// The same set re-gridded onto a lattice-aligned grid, which must contain every set cell.
    pub fn embed(&self, target: &Grid) -> Result<RoughSet> {
        let off = self.grid.offset_in(target)?;
        let mut cells = vec![false; target.cell_count()];
        for (c, _) in self.cells.iter().enumerate().filter(|(_, &b)| b) {
            let m = self.grid.cell_multi(c);
            let t = [m[0] as i64 + off[0], m[1] as i64 + off[1], m[2] as i64 + off[2]];
            let idx = target
                .cell_at(t)
                .ok_or_else(|| Error::GridTooSmall("target grid does not contain the set".into()))?;
            cells[idx] = true;
        }
        let mut out = RoughSet::new(target.clone(), cells)?;
        let moved: Vec<(Facet, f64)> = self
            .cracks
            .iter()
            .map(|(&f, &w)| {
                let b = self.grid.facet_base(f);
                let nb = [
                    (b[0] as i64 + off[0]) as usize,
                    (b[1] as i64 + off[1]) as usize,
                    (b[2] as i64 + off[2]) as usize,
                ];
                (target.facet(f.axis as usize, nb), w)
            })
            .collect();
        out.add_cracks(moved)?;
        Ok(out)
    }

    /// True when every set cell keeps at least `margin` cells of distance from the grid edge.
    pub fn has_margin(&self, margin: usize) -> bool {
        let g = &self.grid;
        self.cells.iter().enumerate().filter(|(_, &b)| b).all(|(c, _)| {
            let m = g.cell_multi(c);
            (0..g.dim()).all(|a| m[a] >= margin && m[a] + margin < g.extent(a))
        })
    }

    /// Complement of the set inside its grid, without cracks.
    pub fn complement(&self) -> RoughSet {
        RoughSet::new(self.grid.clone(), self.cells.iter().map(|b| !b).collect()).expect("same grid")
    }

    /// Copy of the set with all cracks removed.
    pub fn without_cracks(&self) -> RoughSet {
        RoughSet::new(self.grid.clone(), self.cells.clone()).expect("same grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block() -> RoughSet {
        let g = Grid::new(1.0, &[0.0, 0.0], &[4, 4]).unwrap();
        let gg = g.clone();
        RoughSet::from_predicate(g, move |c| {
            let m = gg.cell_multi(c);
            (1..3).contains(&m[0]) && (1..3).contains(&m[1])
        })
    }

    #[test]
    fn boundary_of_block() {
        let s = block();
        assert_eq!(s.count(), 4);
        assert_eq!(s.boundary_facets().len(), 8);
    }

    #[test]
    fn crack_must_separate_set_cells() {
        let s = block();
        let g = s.grid().clone();
        let inner = g.facet(1, [1, 2, 0]);
        let outer = g.facet(1, [0, 2, 0]);
        assert!(s.clone().with_cracks([(inner, 1.0)]).is_ok());
        assert!(matches!(s.with_cracks([(outer, 1.0)]), Err(Error::CrackOutsideBody(_))));
    }

    #[test]
    fn embed_shifts_cells_and_cracks() {
        let s = block();
        let f = s.grid().facet(1, [1, 2, 0]);
        let s = s.with_cracks([(f, 1.0)]).unwrap();
        let big = Grid::new(1.0, &[-2.0, -1.0], &[8, 6]).unwrap();
        let e = s.embed(&big).unwrap();
        assert_eq!(e.count(), 4);
        assert!(e.is_crack(big.facet(1, [3, 3, 0])));
        assert!(e.has_margin(1));
    }
}
