//! Normal traces on compactly contained subsets, recovered by mollifying the indicator.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::field::FluxField;
use super::pairing::{pairing, Quadrature};
use super::signed::SignedMeasure;
use super::testfn::TestFunction;
use crate::approx::{central_gradient, MollifierKernel};
use crate::domain::{dist2, Facet, Grid, RoughSet};
use crate::error::{Error, Result};

/// Mollifier radii `8h, 4h, 2h`.
pub fn default_ladder(grid: &Grid) -> Vec<f64> {
    let h = grid.spacing();
    vec![8.0 * h, 4.0 * h, 2.0 * h]
}

#[derive(Clone, Debug, Serialize)]
pub struct InteriorLevel {
    pub eps: f64,
    /// `int_E phi F . grad(chi_E * rho_eps)` gathered onto the nearest boundary facet of `E`.
    pub measure: SignedMeasure,
    pub pairings: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GateRow {
    pub values: Vec<f64>,
    pub extrapolated: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InteriorTrace {
    pub levels: Vec<InteriorLevel>,
    /// Minus twice the finest level: the normal trace seen from inside `E`.
    pub trace: SignedMeasure,
    pub gate: Vec<GateRow>,
    pub gate_passed: bool,
    /// `|int_E F . grad(phi) + int_E phi d(div F) - trace(phi)|` per test function.
    pub identity_residuals: Vec<f64>,
    /// `|discrete outgoing flux of E (phi) - trace(phi)|` per test function.
    pub discrete_gaps: Vec<f64>,
}

impl InteriorTrace {
    /// Mean density of the finest level over a group of facets.
    pub fn mean_density(&self, grid: &Grid, facets: &[Facet]) -> f64 {
        let m = &self.levels.last().expect("at least one level").measure;
        let sum: f64 = facets.iter().map(|f| m.facet_atoms.get(f).copied().unwrap_or(0.0)).sum();
        sum / (facets.len() as f64 * grid.facet_area())
    }
}

/// Aitken extrapolation of a sequence ending in `v[2]`; passes when the
/// correction is at most three times the last difference.
pub fn richardson_gate(values: &[f64]) -> GateRow {
    let n = values.len();
    let (a, b, c) = (values[n - 3], values[n - 2], values[n - 1]);
    let (d1, d2) = (b - a, c - b);
    let denom = d2 - d1;
    let extrapolated = if denom == 0.0 { c } else { c - d2 * d2 / denom };
    let passed = (extrapolated - c).abs() <= 3.0 * d2.abs() + 1e-14 * (1.0 + c.abs());
    GateRow { values: values.to_vec(), extrapolated, passed }
}

/// Facets of `E` toward its complement, with a bucket index of their centers.
struct FacetIndex {
    centers: Vec<(Facet, [f64; 3])>,
    buckets: HashMap<[i64; 3], Vec<usize>>,
    size: f64,
    dim: usize,
}

impl FacetIndex {
    fn new(e: &RoughSet, size: f64) -> FacetIndex {
        let g = e.grid();
        let centers: Vec<(Facet, [f64; 3])> = e.boundary_facets().into_iter().map(|(f, _)| (f, g.facet_center(f))).collect();
        let mut idx = FacetIndex { centers: Vec::new(), buckets: HashMap::new(), size, dim: g.dim() };
        for (i, (_, x)) in centers.iter().enumerate() {
            idx.buckets.entry(idx.key(x)).or_default().push(i);
        }
        idx.centers = centers;
        idx
    }

    fn key(&self, x: &[f64; 3]) -> [i64; 3] {
        let mut k = [0; 3];
        for a in 0..self.dim {
            k[a] = (x[a] / self.size).floor() as i64;
        }
        k
    }

    fn nearest(&self, x: &[f64; 3]) -> Option<Facet> {
        let k = self.key(x);
        let span = |a: usize| if a < self.dim { -1..=1 } else { 0..=0 };
        let mut best: Option<(f64, Facet)> = None;
        for dk in span(2) {
            for dj in span(1) {
                for di in span(0) {
                    for &i in self.buckets.get(&[k[0] + di, k[1] + dj, k[2] + dk]).into_iter().flatten() {
                        let (f, c) = self.centers[i];
                        let d = dist2(&c, x);
                        let better = match best {
                            None => true,
                            Some((bd, bf)) => d < bd || (d == bd && f < bf),
                        };
                        if better {
                            best = Some((d, f));
                        }
                    }
                }
            }
        }
        best.map(|b| b.1)
    }
}

/// Interior normal trace of `field` on `E`, a set compactly contained in `set`.
///
/// For each radius of `ladder` (descending, at least three entries) the
/// cells of `E` contribute `F . grad(chi_E * rho_eps)` times the cell volume
/// to the nearest boundary facet of `E`.
pub fn interior_normal_trace(
    field: &FluxField,
    e: &RoughSet,
    set: &RoughSet,
    basis: &[TestFunction],
    ladder: &[f64],
) -> Result<InteriorTrace> {
    let g = set.grid();
    if field.grid() != g || e.grid() != g {
        return Err(Error::GridMismatch("field, subset and set must share a grid".into()));
    }
    if ladder.len() < 3 || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("the radius ladder needs at least 3 strictly decreasing entries".into()));
    }
    if e.count() == 0 {
        return Err(Error::EmptySet("the subset has no cells".into()));
    }
    let near = g.ball_offsets(1.8 * g.spacing());
    for c in (0..g.cell_count()).filter(|&c| e.contains(c)) {
        let m = g.cell_multi(c);
        let ok = near.iter().all(|o| {
            g.cell_at([m[0] as i64 + o[0], m[1] as i64 + o[1], m[2] as i64 + o[2]])
                .is_some_and(|n| set.contains(n) && g.cell_faces(n).all(|fs| !set.is_crack(fs.facet)))
        });
        if !ok {
            return Err(Error::InvalidArgument("the subset must stay one cell away from the boundary and cracks".into()));
        }
    }
    let index = FacetIndex::new(e, ladder[0] + 2.0 * g.spacing());
    let vol = g.cell_volume();
    let mut levels = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let kernel = MollifierKernel::new(g, eps)?;
        let w = kernel.smooth_indicator(e);
        let contributions: Vec<(Facet, f64)> = (0..g.cell_count())
            .into_par_iter()
            .filter(|&c| e.contains(c))
            .filter_map(|c| {
                let d = central_gradient(g, &w, c, 0.0);
                if d == [0.0; 3] {
                    return None;
                }
                let v = field.cell_vector(c);
                let flux = (v[0] * d[0] + v[1] * d[1] + v[2] * d[2]) * vol;
                index.nearest(&g.cell_center(c)).map(|f| (f, flux))
            })
            .collect();
        let mut measure = SignedMeasure::default();
        for (f, x) in contributions {
            measure.add_facet(f, x);
        }
        let pairings = basis.iter().map(|phi| measure.pair(g, |x| phi.value(x))).collect();
        levels.push(InteriorLevel { eps, measure, pairings });
    }
    let trace = levels.last().unwrap().measure.scaled(-2.0);
    let gate: Vec<GateRow> = (0..basis.len())
        .map(|k| richardson_gate(&levels.iter().map(|l| l.pairings[k]).collect::<Vec<_>>()))
        .collect();
    let gate_passed = gate.iter().all(|r| r.passed);
    let discrete = super::trace::trace_measure(field, e, g)?;
    let mut identity_residuals = Vec::new();
    let mut discrete_gaps = Vec::new();
    for phi in basis {
        let t = trace.pair(g, |x| phi.value(x));
        identity_residuals.push((pairing(field, e, phi, Quadrature::Mimetic)? - t).abs());
        discrete_gaps.push((discrete.pair(|x| phi.value(x)) - t).abs());
    }
    Ok(InteriorTrace { levels, trace, gate, gate_passed, identity_residuals, discrete_gaps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_accepts_first_order_convergence() {
        assert!(richardson_gate(&[1.08, 1.04, 1.02]).passed);
        assert!((richardson_gate(&[1.08, 1.04, 1.02]).extrapolated - 1.0).abs() < 1e-12);
        assert!(!richardson_gate(&[1.0, 1.1, 1.19]).passed);
        assert!(richardson_gate(&[0.5, 0.5, 0.5]).passed);
    }
}
