//! Crack-respecting mollification of fields and weak-star convergence of their traces.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use super::divergence::check_grid;
use super::field::FluxField;
use super::testfn::TestFunction;
use super::trace::trace_measure;
use crate::approx::MollifierKernel;
use crate::domain::{Facet, FacetKind, Grid, RoughSet, Side};
use crate::error::{Error, Result};
use crate::measure::star_measure;

/// Cells touching a crack or boundary facet, grown by `reach` cells in every direction.
fn dirty_mask(set: &RoughSet, reach: usize) -> Vec<bool> {
    let g = set.grid();
    let mut mask = vec![false; g.cell_count()];
    for f in set.two_sided_facets() {
        for s in [Side::Lower, Side::Upper] {
            if let Some(c) = g.facet_cell(f, s) {
                mask[c] = true;
            }
        }
    }
    for a in 0..g.dim() {
        let prev = mask.clone();
        for (c, m) in mask.iter_mut().enumerate() {
            if *m {
                continue;
            }
            *m = (1..=reach as i64).any(|k| {
                g.neighbor(c, a, k).is_some_and(|n| prev[n]) || g.neighbor(c, a, -k).is_some_and(|n| prev[n])
            });
        }
    }
    mask
}

/// Cells reachable from `anchor` inside a cube of half-width `reach`
/// without crossing a crack or leaving the set, as a local membership grid.
struct Region {
    dim: usize,
    reach: i64,
    width: i64,
    base: [i64; 3],
    inside: Vec<bool>,
}

impl Region {
    fn grow(set: &RoughSet, anchor: usize, reach: i64) -> Region {
        let g = set.grid();
        let dim = g.dim();
        let width = 2 * reach + 1;
        let m = g.cell_multi(anchor);
        let base = [m[0] as i64, m[1] as i64, m[2] as i64];
        let size = (width as usize).pow(dim as u32);
        let mut r = Region { dim, reach, width, base, inside: vec![false; size] };
        let mut queue = VecDeque::new();
        r.mark(base);
        queue.push_back(anchor);
        while let Some(c) = queue.pop_front() {
            for fs in g.cell_faces(c) {
                if set.facet_kind(fs.facet) != FacetKind::Interior {
                    continue;
                }
                let Some(n) = g.facet_cell(fs.facet, fs.side.opposite()) else { continue };
                let nm = g.cell_multi(n);
                let p = [nm[0] as i64, nm[1] as i64, nm[2] as i64];
                if r.slot(p).is_some_and(|s| !r.inside[s]) {
                    r.mark(p);
                    queue.push_back(n);
                }
            }
        }
        r
    }

    fn slot(&self, p: [i64; 3]) -> Option<usize> {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for a in 0..self.dim {
            let d = p[a] - self.base[a];
            if d.abs() > self.reach {
                return None;
            }
            idx += (d + self.reach) as usize * stride;
            stride *= self.width as usize;
        }
        Some(idx)
    }

    fn mark(&mut self, p: [i64; 3]) {
        if let Some(s) = self.slot(p) {
            self.inside[s] = true;
        }
    }

    fn contains(&self, g: &Grid, cell: Option<usize>) -> bool {
        cell.is_some_and(|c| {
            let m = g.cell_multi(c);
            self.slot([m[0] as i64, m[1] as i64, m[2] as i64]).is_some_and(|s| self.inside[s])
        })
    }
}

/// Facet shifted by a lattice offset, if it exists.
fn shifted(g: &Grid, f: Facet, o: &[i64; 3]) -> Option<Facet> {
    g.translate_facet(f, g, *o)
}

/// Mollified value on the side of `f` whose cell is `anchor`.
fn smoothed_value(field: &FluxField, set: &RoughSet, taps: &[([i64; 3], f64)], f: Facet, anchor: usize, reach: i64) -> f64 {
    let g = set.grid();
    let region = Region::grow(set, anchor, reach);
    let (mut num, mut den) = (0.0, 0.0);
    for (o, w) in taps {
        let Some(src) = shifted(g, f, o) else { continue };
        let lo = g.facet_cell(src, Side::Lower);
        let up = g.facet_cell(src, Side::Upper);
        match set.facet_kind(src) {
            FacetKind::Interior => {
                if region.contains(g, lo) || region.contains(g, up) {
                    num += w * field.side_value(src, Side::Lower);
                    den += w;
                }
            }
            FacetKind::Crack | FacetKind::Boundary { .. } => {
                let sides: Vec<Side> = [Side::Lower, Side::Upper]
                    .into_iter()
                    .filter(|&s| set.contains_opt(g.facet_cell(src, s)) && region.contains(g, g.facet_cell(src, s)))
                    .collect();
                let share = w / sides.len().max(1) as f64;
                for s in &sides {
                    num += share * field.side_value(src, *s);
                    den += share;
                }
            }
            FacetKind::Exterior => {}
        }
    }
    if den > 0.0 {
        num / den
    } else {
        field.side_value(f, if g.facet_cell(f, Side::Lower) == Some(anchor) { Side::Lower } else { Side::Upper })
    }
}

/// Mollifies each facet component of `field` over the facets reachable
/// within `eps` without crossing cracks, renormalizing the kernel near
/// cracks and the boundary. The bound becomes the largest new magnitude.
pub fn mollify_field(field: &FluxField, set: &RoughSet, eps: f64) -> Result<FluxField> {
    check_grid(field, set)?;
    let g = set.grid();
    let kernel = MollifierKernel::new(g, eps)?;
    let reach = (eps / g.spacing()).ceil() as i64 + 1;
    let dirty = dirty_mask(set, reach as usize);
    let taps = kernel.taps();
    let facets: Vec<Facet> = g.all_facets().collect();
    let results: Vec<(Facet, [Option<f64>; 2])> = facets
        .par_iter()
        .filter_map(|&f| {
            let lo = g.facet_cell(f, Side::Lower);
            let up = g.facet_cell(f, Side::Upper);
            match set.facet_kind(f) {
                FacetKind::Interior => {
                    let (l, u) = (lo.unwrap(), up.unwrap());
                    let v = if !dirty[l] && !dirty[u] {
                        taps.iter()
                            .map(|(o, w)| w * field.side_value(shifted(g, f, o).expect("clean window"), Side::Lower))
                            .sum()
                    } else {
                        smoothed_value(field, set, taps, f, l, reach)
                    };
                    Some((f, [Some(v), None]))
                }
                FacetKind::Crack => Some((
                    f,
                    [
                        Some(smoothed_value(field, set, taps, f, lo.unwrap(), reach)),
                        Some(smoothed_value(field, set, taps, f, up.unwrap(), reach)),
                    ],
                )),
                FacetKind::Boundary { inside } => {
                    let c = if inside == Side::Lower { lo } else { up }.unwrap();
                    let v = smoothed_value(field, set, taps, f, c, reach);
                    Some((f, if inside == Side::Lower { [Some(v), None] } else { [None, Some(v)] }))
                }
                FacetKind::Exterior => None,
            }
        })
        .collect();
    let mut out = FluxField::zeros_for(set);
    for (f, vals) in results {
        match set.facet_kind(f) {
            FacetKind::Interior => out.set_value(f, vals[0].unwrap()),
            _ => {
                for s in [Side::Lower, Side::Upper] {
                    if let Some(v) = vals[s.index()] {
                        out.set_side(f, s, v);
                    }
                }
            }
        }
    }
    out.tighten_bound();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WeakStarVerdict {
    Convergent,
    NotConvergent,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakStarRow {
    pub eps: f64,
    pub gaps: Vec<f64>,
    pub max_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakStarReport {
    pub rows: Vec<WeakStarRow>,
    /// `sup|F| * boundary measure * max|phi|`.
    pub scale: f64,
    pub verdict: WeakStarVerdict,
}

/// Relative gap below which the finest level counts as converged.
pub const WEAK_STAR_TOLERANCE: f64 = 1e-3;

/// Pairs the traces of mollified fields against `basis` and compares with
/// the trace of `field` along a decreasing ladder of radii.
pub fn trace_weak_convergence(field: &FluxField, set: &RoughSet, basis: &[TestFunction], ladder: &[f64]) -> Result<WeakStarReport> {
    check_grid(field, set)?;
    if ladder.len() < 3 || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("the radius ladder needs at least 3 strictly decreasing entries".into()));
    }
    let g = set.grid();
    let exact = trace_measure(field, set, g)?;
    let targets: Vec<f64> = basis.iter().map(|phi| exact.pair(|x| phi.value(x))).collect();
    let phi_sup = basis
        .iter()
        .map(|phi| phi.sup_on(exact.atoms.keys().map(|fs| g.facet_center(fs.facet))))
        .fold(0.0, f64::max);
    let scale = field.sup_bound() * star_measure(set) * phi_sup;
    let mut rows = Vec::new();
    for &eps in ladder {
        let smooth = mollify_field(field, set, eps)?;
        let t = trace_measure(&smooth, set, g)?;
        let gaps: Vec<f64> = basis.iter().zip(&targets).map(|(phi, v)| (t.pair(|x| phi.value(x)) - v).abs()).collect();
        let max_gap = gaps.iter().cloned().fold(0.0, f64::max);
        rows.push(WeakStarRow { eps, gaps, max_gap });
    }
    let monotone = rows.windows(2).all(|w| w[1].max_gap <= 1.1 * w[0].max_gap + 1e-15 * scale);
    let small = rows.last().unwrap().max_gap <= WEAK_STAR_TOLERANCE * scale;
    let verdict = if monotone && small { WeakStarVerdict::Convergent } else { WeakStarVerdict::NotConvergent };
    Ok(WeakStarReport { rows, scale, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmfield::sample_field;
    use crate::domain::Preset;

    #[test]
    fn constants_survive_near_cracks() {
        let g = Preset::SlitSquare.grid(16).unwrap();
        let s = Preset::SlitSquare.rasterize(&g).unwrap();
        let f = sample_field(|_| [0.3, -0.7, 0.0], &s, 1.0).unwrap();
        let m = mollify_field(&f, &s, 4.0 * g.spacing()).unwrap();
        for facet in g.all_facets() {
            for side in [Side::Lower, Side::Upper] {
                let d = (m.side_value(facet, side) - f.side_value(facet, side)).abs();
                assert!(d < 1e-13, "{facet:?} {side:?} {d}");
            }
        }
    }

    #[test]
    fn jump_across_slit_is_kept() {
        let g = Preset::SlitSquare.grid(16).unwrap();
        let s = Preset::SlitSquare.rasterize(&g).unwrap();
        let f = sample_field(|x| [0.0, x[1].signum(), 0.0], &s, 1.0).unwrap();
        let m = mollify_field(&f, &s, 4.0 * g.spacing()).unwrap();
        let crack = *s.cracks().keys().nth(5).unwrap();
        assert!((m.side_value(crack, Side::Lower) + 1.0).abs() < 1e-13);
        assert!((m.side_value(crack, Side::Upper) - 1.0).abs() < 1e-13);
        assert!(m.sup_bound() <= f.sup_bound() * (1.0 + 1e-12));
    }
}
