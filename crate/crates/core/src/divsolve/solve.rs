//! Divergence-free fields with prescribed normal trace.

use std::collections::BTreeMap;

use serde::Serialize;

use super::data::{compatible, TraceData};
use super::graph::CellGraph;
use crate::dmfield::{trace_measure, FluxField};
use crate::domain::{FacetKind, FacetSide, Grid, RoughSet, Side};
use crate::error::{Error, Result};

/// Default solver tolerance on cell flux balances.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveMode {
    Direct,
    Decomposed,
}

/// Pieces of a decomposed solve: the field on the whole box, the trace it
/// leaves on the outer side of the reduced boundary, and the correction.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    /// The box field restricted to the set.
    #[serde(skip)]
    pub global: FluxField,
    #[serde(skip)]
    pub exterior_trace: TraceData,
    #[serde(skip)]
    pub correction: FluxField,
    /// Integral of the exterior trace; zero up to solver round-off.
    pub exterior_integral: f64,
    pub box_components: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub mode: SolveMode,
    #[serde(skip)]
    pub field: FluxField,
    /// Largest cell flux balance in the set.
    pub interior_div_residual: f64,
    pub trace_residual_l1: f64,
    pub trace_residual_linf: f64,
    /// `sup|F| / sup|g|`.
    pub kappa: f64,
    pub iterations: usize,
    pub components: usize,
    pub intermediate: Option<Decomposition>,
}

/// Facet values `u(lower) - u(upper)` on every uncut facet between two nodes.
fn gradient_field(grid: &Grid, graph: &CellGraph, u: &[f64], set: &RoughSet, field: &mut FluxField) {
    for f in grid.all_facets() {
        if set.facet_kind(f) != FacetKind::Interior {
            continue;
        }
        let lo = grid.facet_cell(f, Side::Lower).and_then(|c| graph.node_of[c]);
        let up = grid.facet_cell(f, Side::Upper).and_then(|c| graph.node_of[c]);
        if let (Some(i), Some(j)) = (lo, up) {
            field.set_value(f, u[i] - u[j]);
        }
    }
}

fn finish(mode: SolveMode, mut field: FluxField, set: &RoughSet, g: &TraceData, iterations: usize, components: usize) -> Result<SolveReport> {
    field.tighten_bound();
    let grid = set.grid();
    let interior_div_residual = (0..grid.cell_count())
        .filter(|&c| set.contains(c))
        .map(|c| field.cell_balance(c).abs())
        .fold(0.0, f64::max);
    let (l1, linf) = trace_gap(&field, set, g)?;
    let sup = g.sup();
    Ok(SolveReport {
        mode,
        kappa: if sup > 0.0 { field.max_abs() / sup } else { 0.0 },
        field,
        interior_div_residual,
        trace_residual_l1: l1,
        trace_residual_linf: linf,
        iterations,
        components,
        intermediate: None,
    })
}

/// L1 and L-infinity gaps between the measured trace of `field` and `g`.
pub(crate) fn trace_gap(field: &FluxField, set: &RoughSet, g: &TraceData) -> Result<(f64, f64)> {
    let t = trace_measure(field, set, set.grid())?;
    let area = set.grid().facet_area();
    let mut l1 = 0.0;
    let mut linf = 0.0f64;
    for fs in set.inner_sides() {
        let d = (t.density(fs).unwrap_or(0.0) - g.get(fs)).abs();
        l1 += d * area;
        linf = linf.max(d);
    }
    Ok((l1, linf))
}

/// Solves `div F = 0` in the set with outgoing flux `g` on the boundary and
/// on both sides of every crack. `F` is the discrete gradient of a potential
/// on the cell graph cut along the cracks; `g` must integrate to zero on
/// each connected piece of that graph.
pub fn solve_direct(set: &RoughSet, g: &TraceData, tol: f64) -> Result<SolveReport> {
    g.check_support(set)?;
    let grid = set.grid();
    let graph = CellGraph::new(grid, |c| set.contains(c), |f| set.is_crack(f));
    let b = graph.sources(grid, &g.values);
    graph.check_compatible(&b, grid.facet_area())?;
    let (u, iterations) = graph.solve(&b, 0.1 * tol, grid.facet_area())?;
    let mut field = FluxField::zeros_for(set);
    gradient_field(grid, &graph, &u, set, &mut field);
    for fs in set.inner_sides() {
        field.set_side(fs.facet, fs.side, fs.side.outward_sign() * g.get(fs));
    }
    finish(SolveMode::Direct, field, set, g, iterations, graph.components)
}

/// Solves the same problem in two steps. First a potential on the whole
/// box, cut only along the cracks, absorbs `g` as jumps across the set's
/// boundary; its flux leaving the set through the outer side of the reduced
/// boundary is `h`. Then a crack-free correction with trace `h` on the
/// reduced boundary is added inside the set.
pub fn solve_decomposed(set: &RoughSet, g: &TraceData, bbox: &Grid, tol: f64) -> Result<SolveReport> {
    g.check_support(set)?;
    let grid = set.grid();
    let off = grid.offset_in(bbox)?;
    let inner = set.embed(bbox)?;
    if !inner.has_margin(1) {
        return Err(Error::GridTooSmall("the box must strictly contain the set".into()));
    }
    let to_box = |fs: FacetSide| FacetSide::new(grid.translate_facet(fs.facet, bbox, off).expect("set facets lie in the box"), fs.side);
    let back = [-off[0], -off[1], -off[2]];
    let from_box = |fs: FacetSide| FacetSide::new(bbox.translate_facet(fs.facet, grid, back).expect("set facets lie in the set grid"), fs.side);

    let alpha: BTreeMap<FacetSide, f64> = inner.inner_sides().into_iter().map(|fs| (fs, g.get(from_box(fs)))).collect();
    let graph = CellGraph::new(bbox, |_| true, |f| inner.is_crack(f));
    let b = graph.sources(bbox, &alpha);
    graph.check_compatible(&b, bbox.facet_area())?;
    let (u, box_iterations) = graph.solve(&b, 0.1 * tol, bbox.facet_area())?;
    let node = |c: Option<usize>| c.and_then(|c| graph.node_of[c]).map(|i| u[i]);

    let mut global = FluxField::zeros_for(set);
    let mut h = TraceData::new(grid);
    for fs in inner.inner_sides() {
        let f = fs.facet;
        let local = from_box(fs);
        let a = alpha[&fs];
        match inner.facet_kind(f) {
            FacetKind::Crack => global.set_side(local.facet, fs.side, fs.side.outward_sign() * a),
            _ => {
                let here = node(bbox.facet_cell(f, fs.side)).expect("set cell is a node");
                let there = node(bbox.facet_cell(f, fs.side.opposite())).expect("box strictly contains the set");
                global.set_side(local.facet, fs.side, fs.side.outward_sign() * (here - there + a));
                h.set(local, there - here);
            }
        }
    }
    for f in grid.all_facets() {
        if set.facet_kind(f) != FacetKind::Interior {
            continue;
        }
        let lo = to_box(FacetSide::new(f, Side::Lower));
        let up = node(bbox.facet_cell(lo.facet, Side::Upper));
        let down = node(bbox.facet_cell(lo.facet, Side::Lower));
        global.set_value(f, down.expect("set cell") - up.expect("set cell"));
    }
    let exterior_integral = h.integral();
    if !compatible(exterior_integral, h.abs_integral()) {
        return Err(Error::Solver(format!("the exterior trace integrates to {exterior_integral:e} instead of 0")));
    }
    let mut reduced = h.clone();
    for f in set.cracks().keys() {
        for s in [Side::Lower, Side::Upper] {
            reduced.set(FacetSide::new(*f, s), 0.0);
        }
    }
    let correction = solve_direct(set, &reduced, tol)?;
    let field = global.add(&correction.field)?;
    let mut report = finish(SolveMode::Decomposed, field, set, g, box_iterations + correction.iterations, correction.components)?;
    report.intermediate = Some(Decomposition {
        global,
        exterior_trace: h,
        correction: correction.field,
        exterior_integral,
        box_components: graph.components,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Preset;

    fn square(n: usize) -> RoughSet {
        let grid = Preset::Square.grid(n).unwrap();
        Preset::Square.rasterize(&grid).unwrap()
    }

    #[test]
    fn uniform_flow_through_square() {
        let s = square(8);
        let g = TraceData::from_fn(&s, |_, n| -n[0]);
        let r = solve_direct(&s, &g, DEFAULT_TOL).unwrap();
        assert!(r.interior_div_residual <= 1e-10);
        assert!(r.trace_residual_linf <= 1e-12);
        for f in s.grid().facets(0) {
            if s.facet_kind(f) == FacetKind::Interior {
                assert!((r.field.value(f) + 1.0).abs() < 1e-9, "{}", r.field.value(f));
            }
        }
    }

    #[test]
    fn constant_outflow_is_incompatible() {
        let s = square(8);
        let g = TraceData::from_fn(&s, |_, _| 1.0);
        assert!(matches!(solve_direct(&s, &g, DEFAULT_TOL), Err(Error::Compatibility(_))));
        let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], s.grid().spacing(), 14).unwrap();
        assert!(matches!(solve_decomposed(&s, &g, &bbox, DEFAULT_TOL), Err(Error::Compatibility(_))));
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let s = square(8);
        let g = TraceData::new(s.grid());
        let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], s.grid().spacing(), 14).unwrap();
        for r in [solve_direct(&s, &g, DEFAULT_TOL).unwrap(), solve_decomposed(&s, &g, &bbox, DEFAULT_TOL).unwrap()] {
            assert_eq!(r.field.max_abs(), 0.0);
        }
    }

    #[test]
    fn modes_agree_on_crack_free_square() {
        let s = square(16);
        let g = TraceData::from_fn(&s, |x, n| x[0] * x[1] * n[0] + (x[0] * x[0] - x[1] * x[1]) * n[1]);
        let bbox = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], s.grid().spacing(), 14).unwrap();
        let d = solve_direct(&s, &g, DEFAULT_TOL).unwrap();
        let e = solve_decomposed(&s, &g, &bbox, DEFAULT_TOL).unwrap();
        assert!(d.trace_residual_linf <= 1e-8 && e.trace_residual_linf <= 1e-8);
        assert!(e.interior_div_residual <= 1e-10, "{}", e.interior_div_residual);
        let dec = e.intermediate.as_ref().unwrap();
        let sum = dec.global.add(&dec.correction).unwrap();
        assert_eq!(sum.add(&e.field.scaled(-1.0)).unwrap().max_abs(), 0.0);
    }
}
