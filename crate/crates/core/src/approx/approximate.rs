//! Inner and outer approximations with perimeter controlled by the boundary measure.

use serde::Serialize;

use super::cover::{audit_cover, build_cover, covered_cells, BallCover, CoverAudit, CoverInput};
use super::kernel::MollifierKernel;
use crate::domain::{Grid, RoughSet};
use crate::error::{Error, Result};
use crate::measure::{classify, facet_perimeter, perimeter, star_facets, star_measure, ClassifyOptions, Label};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxSide {
    Interior,
    Exterior,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxReport {
    pub side: ApproxSide,
    pub delta: f64,
    pub spacing: f64,
    /// The approximating set: inside the set for interior runs, around it for exterior runs.
    #[serde(skip)]
    pub approximant: RoughSet,
    pub cells: usize,
    /// Mollified perimeter of the approximant at radius four cells.
    pub perimeter: f64,
    /// Volume between the set and the approximant.
    pub removed_volume: f64,
    /// Measure of the boundary part the bound is stated against.
    pub boundary_measure: f64,
    pub ratio: f64,
    pub cover: BallCover,
    pub audit: CoverAudit,
}

fn check_delta(grid: &Grid, delta: f64) -> Result<()> {
    let limit = 8.0 * grid.spacing();
    if !(delta >= limit * (1.0 - 1e-12)) {
        return Err(Error::BelowResolution { radius: delta, limit });
    }
    Ok(())
}

/// Removes from `set` every cell touched by a ball of the cover at scale
/// `delta`. What remains stays a cell away from the boundary and the cracks.
pub fn interior_approximation(set: &RoughSet, delta: f64) -> Result<ApproxReport> {
    let g = set.grid();
    check_delta(g, delta)?;
    if set.count() == 0 {
        return Err(Error::EmptySet("the set has no cells".into()));
    }
    let cls = classify(set, &ClassifyOptions::for_grid(g))?;
    let zero_cells = (0..g.cell_count()).filter(|&c| set.contains(c) && cls.labels[c] == Label::Exterior).collect();
    let boundary_measure = star_measure(set);
    let input = CoverInput {
        work: set,
        outside: false,
        zero_cells,
        facets: star_facets(set).into_iter().map(|(f, _)| f).collect(),
        boundary_measure,
    };
    let cover = build_cover(&input, delta);
    let hit = covered_cells(g, &cover);
    let kept: Vec<bool> = (0..g.cell_count()).map(|c| set.contains(c) && !hit[c]).collect();
    let audit = audit_cover(&input, &cover, &kept, delta);
    let approximant = RoughSet::new(g.clone(), kept)?;
    if approximant.count() == 0 {
        return Err(Error::EmptySet(format!("nothing of the set survives at scale {delta}")));
    }
    let p = perimeter(&approximant, 4.0 * g.spacing(), None)?;
    Ok(ApproxReport {
        side: ApproxSide::Interior,
        delta,
        spacing: g.spacing(),
        cells: approximant.count(),
        perimeter: p,
        removed_volume: (set.count() - approximant.count()) as f64 * g.cell_volume(),
        boundary_measure,
        ratio: p / boundary_measure,
        approximant,
        cover,
        audit,
    })
}

/// Interior approximation of the complement of `set` inside `bbox`, turned
/// back into a set containing `set`. Cracks play no part.
///
/// `bbox` must hold the set with room for the cover balls and the
/// perimeter stencil.
pub fn exterior_approximation(set: &RoughSet, delta: f64, bbox: &Grid) -> Result<ApproxReport> {
    check_delta(bbox, delta)?;
    if set.count() == 0 {
        return Err(Error::EmptySet("the set has no cells".into()));
    }
    let inner = set.embed(bbox)?.without_cracks();
    let margin = (delta / (2.0 * bbox.spacing())).ceil() as usize + 7;
    if !inner.has_margin(margin) {
        return Err(Error::GridTooSmall(format!("the box must keep {margin} cells around the set")));
    }
    let outer = inner.complement();
    let mut options = ClassifyOptions::for_grid(bbox);
    options.outside = true;
    let cls = classify(&outer, &options)?;
    let zero_cells = (0..bbox.cell_count()).filter(|&c| outer.contains(c) && cls.labels[c] == Label::Exterior).collect();
    let boundary_measure = facet_perimeter(&inner);
    let input = CoverInput {
        work: &outer,
        outside: true,
        zero_cells,
        facets: inner.boundary_facets().into_iter().map(|(f, _)| f).collect(),
        boundary_measure,
    };
    let cover = build_cover(&input, delta);
    let hit = covered_cells(bbox, &cover);
    let kept: Vec<bool> = (0..bbox.cell_count()).map(|c| outer.contains(c) && !hit[c]).collect();
    let audit = audit_cover(&input, &cover, &kept, delta);
    let approximant = RoughSet::new(bbox.clone(), kept.iter().map(|k| !k).collect())?;
    let p = perimeter(&approximant, 4.0 * bbox.spacing(), None)?;
    Ok(ApproxReport {
        side: ApproxSide::Exterior,
        delta,
        spacing: bbox.spacing(),
        cells: approximant.count(),
        perimeter: p,
        removed_volume: (approximant.count() - inner.count()) as f64 * bbox.cell_volume(),
        boundary_measure,
        ratio: if boundary_measure > 0.0 { p / boundary_measure } else { 0.0 },
        approximant,
        cover,
        audit,
    })
}

/// The superlevel set `{chi * rho_eps > t}` of the mollified indicator.
pub fn smooth_levelset(set: &RoughSet, eps: f64, t: f64) -> Result<RoughSet> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("level {t} must lie strictly between 0 and 1")));
    }
    let w = MollifierKernel::new(set.grid(), eps)?.smooth_indicator(set);
    RoughSet::new(set.grid().clone(), w.iter().map(|&v| v > t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Preset;

    #[test]
    fn square_interior_approximation() {
        let g = Preset::Square.grid(64).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        let r = interior_approximation(&s, 0.125).unwrap();
        assert!(r.audit.passed(), "{:?}", r.audit);
        assert!(r.ratio <= 4.0 && r.ratio > 0.5, "{}", r.ratio);
        assert!(r.removed_volume <= 8.0 * 0.125, "{}", r.removed_volume);
        assert!(r.approximant.cells().iter().zip(s.cells()).all(|(e, o)| !e || *o));
    }

    #[test]
    fn isolated_cell_gets_a_density_ball() {
        let g = Grid::covering(&[-1.0, -1.0], &[1.5, 1.0], 1.0 / 32.0, 12).unwrap();
        let m = g.locate(&[1.3, 0.5, 0.0]);
        let speck = g.cell_at(m).unwrap();
        let gg = g.clone();
        let s = RoughSet::from_predicate(g.clone(), move |c| {
            let x = gg.cell_center(c);
            (x[0].abs() < 1.0 && x[1].abs() < 1.0) || c == speck
        });
        let r = interior_approximation(&s, 0.25).unwrap();
        assert!(r.cover.balls.iter().any(|b| b.kind == super::super::BallKind::ExteriorHalfDensity));
        assert!(r.audit.passed(), "{:?}", r.audit);
    }

    #[test]
    fn resolution_and_emptiness_errors() {
        let g = Preset::Square.grid(16).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        assert!(matches!(interior_approximation(&s, 0.25), Err(Error::BelowResolution { .. })));
        let empty = RoughSet::new(g.clone(), vec![false; g.cell_count()]).unwrap();
        assert!(matches!(interior_approximation(&empty, 0.5), Err(Error::EmptySet(_))));
    }

    #[test]
    fn exterior_contains_the_set_and_ignores_cracks() {
        let g = Preset::SlitSquare.grid(32).unwrap();
        let s = Preset::SlitSquare.rasterize(&g).unwrap();
        let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], g.spacing(), 20).unwrap();
        let r = exterior_approximation(&s, 0.5, &bbox).unwrap();
        assert!(r.audit.passed(), "{:?}", r.audit);
        let inner = s.embed(&bbox).unwrap();
        assert!(inner.cells().iter().zip(r.approximant.cells()).all(|(o, f)| !o || *f));
        assert_eq!(r.boundary_measure, 8.0);
        assert!(matches!(exterior_approximation(&s, 0.5, &g), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn levelsets() {
        let g = Preset::Disk.grid(32).unwrap();
        let s = Preset::Disk.rasterize(&g).unwrap();
        let inner = smooth_levelset(&s, 8.0 * g.spacing(), 0.9).unwrap();
        assert!(inner.cells().iter().zip(s.cells()).all(|(i, o)| !i || *o));
        let outer = smooth_levelset(&s, 8.0 * g.spacing(), 0.1).unwrap();
        assert!(outer.cells().iter().zip(s.cells()).all(|(f, o)| !o || *f));
        assert!(matches!(smooth_levelset(&s, 4.0 * g.spacing(), 1.5), Err(Error::InvalidArgument(_))));
    }
}
