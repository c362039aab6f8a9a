//! Independent audit of a solved field.

use serde::Serialize;

use super::data::TraceData;
use super::solve::SolveReport;
use crate::dmfield::{divergence_measure, trace_measure};
use crate::domain::{Facet, FacetKind, RoughSet, Side};
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CellOffender {
    pub cell: usize,
    pub balance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SideOffender {
    pub facet_id: u64,
    pub side: Side,
    pub expected: f64,
    pub measured: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionAudit {
    /// Total variation of the divergence inside the set.
    pub divergence_variation: f64,
    pub trace_linf: f64,
    pub passed: bool,
    /// Worst cell balances above the tolerance, largest first.
    pub cells: Vec<CellOffender>,
    /// Worst trace mismatches above the tolerance, largest first.
    pub sides: Vec<SideOffender>,
    /// Facets the offenders point at: interior facets between two failing
    /// cells and boundary facets with a wrong trace.
    pub suspects: Vec<u64>,
}

const WORST: usize = 8;

/// Recomputes the divergence and the trace of the reported field and
/// compares them with zero and with `g`.
pub fn verify_solution(report: &SolveReport, set: &RoughSet, g: &TraceData, tol: f64) -> Result<SolutionAudit> {
    let field = &report.field;
    let grid = set.grid();
    let div = divergence_measure(field, set)?;
    let area = grid.facet_area();
    let mut cells: Vec<CellOffender> = div
        .cell_atoms
        .iter()
        .map(|(&cell, &w)| CellOffender { cell, balance: w / area })
        .filter(|o| o.balance.abs() > tol)
        .collect();
    cells.sort_by(|a, b| b.balance.abs().total_cmp(&a.balance.abs()).then(a.cell.cmp(&b.cell)));
    let bad_cell = |c: Option<usize>| c.is_some_and(|c| cells.iter().any(|o| o.cell == c));
    let trace = trace_measure(field, set, grid)?;
    let mut trace_linf = 0.0f64;
    let mut sides = Vec::new();
    for fs in set.inner_sides() {
        let measured = trace.density(fs).unwrap_or(0.0);
        let expected = g.get(fs);
        let d = (measured - expected).abs();
        trace_linf = trace_linf.max(d);
        if d > tol {
            sides.push(SideOffender { facet_id: grid.global_facet_id(fs.facet), side: fs.side, expected, measured });
        }
    }
    sides.sort_by(|a, b| (b.measured - b.expected).abs().total_cmp(&(a.measured - a.expected).abs()));
    let mut suspects: Vec<Facet> = grid
        .all_facets()
        .filter(|&f| set.facet_kind(f) == FacetKind::Interior)
        .filter(|&f| bad_cell(grid.facet_cell(f, Side::Lower)) && bad_cell(grid.facet_cell(f, Side::Upper)))
        .collect();
    suspects.extend(sides.iter().map(|s| grid.facet_from_global(s.facet_id).expect("own facet")));
    suspects.sort_unstable();
    suspects.dedup();
    let divergence_variation = div.cell_atoms.values().map(|w| w.abs()).sum::<f64>();
    let passed = cells.is_empty() && sides.is_empty() && divergence_variation <= tol;
    cells.truncate(WORST);
    sides.truncate(WORST);
    Ok(SolutionAudit {
        divergence_variation,
        trace_linf,
        passed,
        cells,
        sides,
        suspects: suspects.iter().map(|&f| grid.global_facet_id(f)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divsolve::{solve_direct, DEFAULT_TOL};
    use crate::domain::Preset;

    #[test]
    fn perturbed_facet_is_reported() {
        let grid = Preset::Square.grid(8).unwrap();
        let s = Preset::Square.rasterize(&grid).unwrap();
        let g = TraceData::from_fn(&s, |_, n| -n[0]);
        let mut r = solve_direct(&s, &g, DEFAULT_TOL).unwrap();
        assert!(verify_solution(&r, &s, &g, DEFAULT_TOL).unwrap().passed);
        let f = grid
            .facets(0)
            .filter(|&f| s.facet_kind(f) == FacetKind::Interior)
            .nth(20)
            .unwrap();
        let v = r.field.value(f);
        r.field.set_value(f, v + 1.0);
        let audit = verify_solution(&r, &s, &g, DEFAULT_TOL).unwrap();
        assert!(!audit.passed);
        assert_eq!(audit.suspects, vec![grid.global_facet_id(f)]);
    }
}
