//! Boundary decomposition and Hausdorff measures of facet sets.

use serde::Serialize;

use super::density::{Classification, Label};
use crate::domain::{Facet, RoughSet, Side};

/// The boundary of a set split into its reduced part, its cracks, and the
/// cells where the set has density zero.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryDecomposition {
    /// Facets between set and non-set cells, with the side of the set cell.
    pub reduced: Vec<(Facet, Side)>,
    /// Crack facets: boundary points where the set has density one.
    pub crack_part: Vec<Facet>,
    /// Cells next to the reduced boundary labelled as density zero.
    pub exterior_part: Vec<usize>,
    pub reduced_measure: f64,
    pub crack_measure: f64,
    /// Measure of the boundary without its density-zero part.
    pub star_measure: f64,
}

pub fn boundary_decomposition(set: &RoughSet, cls: &Classification) -> BoundaryDecomposition {
    let g = set.grid();
    let reduced = set.boundary_facets();
    let mut exterior_part: Vec<usize> = reduced
        .iter()
        .flat_map(|&(f, _)| [g.facet_cell(f, Side::Lower), g.facet_cell(f, Side::Upper)])
        .flatten()
        .filter(|&c| cls.labels[c] == Label::Exterior)
        .collect();
    exterior_part.sort_unstable();
    exterior_part.dedup();
    let reduced_measure = reduced.len() as f64 * g.facet_area();
    let crack_measure = crack_measure(set);
    BoundaryDecomposition {
        crack_part: set.cracks().keys().copied().collect(),
        exterior_part,
        reduced_measure,
        crack_measure,
        star_measure: reduced_measure + crack_measure,
        reduced,
    }
}

fn crack_measure(set: &RoughSet) -> f64 {
    set.cracks().values().sum()
}

/// Measure of the reduced boundary plus the cracks, without classifying cells.
pub fn star_measure(set: &RoughSet) -> f64 {
    set.boundary_facets().len() as f64 * set.grid().facet_area() + crack_measure(set)
}

/// Hausdorff measure of a facet set: one facet area per facet, or the
/// length-corrected weight for snapped crack facets.
pub fn hausdorff_measure(set: &RoughSet, facets: impl IntoIterator<Item = Facet>) -> f64 {
    let area = set.grid().facet_area();
    facets.into_iter().map(|f| *set.cracks().get(&f).unwrap_or(&area)).sum()
}

/// Reduced and crack facets with their Hausdorff weights, in lexicographic order.
pub fn star_facets(set: &RoughSet) -> Vec<(Facet, f64)> {
    let area = set.grid().facet_area();
    let mut out: Vec<(Facet, f64)> = set.boundary_facets().into_iter().map(|(f, _)| (f, area)).collect();
    out.extend(set.cracks().iter().map(|(&f, &w)| (f, w)));
    out.sort_by_key(|a| a.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Preset;
    use crate::measure::{classify, ClassifyOptions};

    #[test]
    fn slit_square_star_measure() {
        for n in [8, 16, 32] {
            let g = Preset::SlitSquare.grid(n).unwrap();
            let s = Preset::SlitSquare.rasterize(&g).unwrap();
            let d = boundary_decomposition(&s, &classify(&s, &ClassifyOptions::for_grid(&g)).unwrap());
            assert!((d.star_measure - 10.0).abs() < 1e-12);
            assert!((d.crack_measure - 2.0).abs() < 1e-12);
            assert!(d.exterior_part.is_empty());
        }
    }

    #[test]
    fn measure_is_additive() {
        let g = Preset::SlitSquare.grid(8).unwrap();
        let s = Preset::SlitSquare.rasterize(&g).unwrap();
        let all: Vec<Facet> = star_facets(&s).into_iter().map(|x| x.0).collect();
        let (a, b) = all.split_at(all.len() / 3);
        let total = hausdorff_measure(&s, all.iter().copied());
        let parts = hausdorff_measure(&s, a.iter().copied()) + hausdorff_measure(&s, b.iter().copied());
        assert!((total - parts).abs() < 1e-12);
    }
}
