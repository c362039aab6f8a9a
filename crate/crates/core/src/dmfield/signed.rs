//! Sparse signed measures made of cell and facet atoms.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::domain::{Facet, Grid, Point};

/// A signed measure with atoms at cell centers and facet centers.
/// Zero atoms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SignedMeasure {
    pub cell_atoms: BTreeMap<usize, f64>,
    pub facet_atoms: BTreeMap<Facet, f64>,
}

impl SignedMeasure {
    pub fn add_cell(&mut self, cell: usize, w: f64) {
        if w != 0.0 {
            let e = self.cell_atoms.entry(cell).or_insert(0.0);
            *e += w;
            if *e == 0.0 {
                self.cell_atoms.remove(&cell);
            }
        }
    }

    pub fn add_facet(&mut self, f: Facet, w: f64) {
        if w != 0.0 {
            let e = self.facet_atoms.entry(f).or_insert(0.0);
            *e += w;
            if *e == 0.0 {
                self.facet_atoms.remove(&f);
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.cell_atoms.values().sum::<f64>() + self.facet_atoms.values().sum::<f64>()
    }

    pub fn total_variation(&self) -> f64 {
        self.cell_atoms.values().map(|w| w.abs()).sum::<f64>() + self.facet_atoms.values().map(|w| w.abs()).sum::<f64>()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_atoms.is_empty() && self.facet_atoms.is_empty()
    }

    /// Integral of `phi` against the measure.
    pub fn pair(&self, grid: &Grid, phi: impl Fn(&Point) -> f64) -> f64 {
        let cells: f64 = self.cell_atoms.iter().map(|(&c, w)| w * phi(&grid.cell_center(c))).sum();
        let facets: f64 = self.facet_atoms.iter().map(|(&f, w)| w * phi(&grid.facet_center(f))).sum();
        cells + facets
    }

    pub fn scaled(&self, k: f64) -> SignedMeasure {
        let mut out = SignedMeasure::default();
        for (&c, &w) in &self.cell_atoms {
            out.add_cell(c, k * w);
        }
        for (&f, &w) in &self.facet_atoms {
            out.add_facet(f, k * w);
        }
        out
    }

    /// Facet atoms only.
    pub fn facet_part(&self) -> SignedMeasure {
        SignedMeasure { cell_atoms: BTreeMap::new(), facet_atoms: self.facet_atoms.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_atoms_vanish() {
        let mut m = SignedMeasure::default();
        m.add_cell(3, 1.5);
        m.add_cell(3, -1.5);
        m.add_cell(4, 0.0);
        assert!(m.is_empty());
    }

    #[test]
    fn variation_and_total() {
        let mut m = SignedMeasure::default();
        m.add_cell(0, 2.0);
        m.add_facet(Facet { axis: 0, index: 1 }, -3.0);
        assert_eq!(m.total(), -1.0);
        assert_eq!(m.total_variation(), 5.0);
        assert_eq!(m.scaled(-2.0).total(), 2.0);
    }
}
