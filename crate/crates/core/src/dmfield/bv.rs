//! Gauss-Green formula for functions of bounded variation on crack-free sets.

use serde::Serialize;

use super::testfn::VectorTestField;
use crate::domain::{FacetKind, RoughSet, Side};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct BvReport {
    /// `|int u div(phi) + int phi . dDu - int u* phi . nu|` per test field.
    pub residuals: Vec<f64>,
    /// Sum of the absolute values of all terms, per test field.
    pub scales: Vec<f64>,
    pub max_relative: f64,
}

/// Checks the Gauss-Green formula for a cell function `u` on a set without
/// cracks; the boundary trace `u*` is the value of the adjacent set cell.
pub fn bv_trace_check(u: &[f64], set: &RoughSet, fields: &[VectorTestField]) -> Result<BvReport> {
    let g = set.grid();
    if set.has_cracks() {
        return Err(Error::InvalidArgument("the function check needs a set without cracks".into()));
    }
    if u.len() != g.cell_count() {
        return Err(Error::GridMismatch("function values do not match the grid".into()));
    }
    let vol = g.cell_volume();
    let area = g.facet_area();
    let mut residuals = Vec::new();
    let mut scales = Vec::new();
    for phi in fields {
        let mut terms = Vec::new();
        for c in (0..g.cell_count()).filter(|&c| set.contains(c)) {
            terms.push(u[c] * phi.divergence(&g.cell_center(c)) * vol);
        }
        for f in g.all_facets() {
            let a = f.axis as usize;
            let x = g.facet_center(f);
            match set.facet_kind(f) {
                FacetKind::Interior => {
                    let (lo, up) = (g.facet_cell(f, Side::Lower).unwrap(), g.facet_cell(f, Side::Upper).unwrap());
                    terms.push((u[up] - u[lo]) * phi.value(&x)[a] * area);
                }
                FacetKind::Boundary { inside } => {
                    let c = g.facet_cell(f, inside).unwrap();
                    terms.push(-u[c] * phi.value(&x)[a] * inside.outward_sign() * area);
                }
                _ => {}
            }
        }
        residuals.push(terms.iter().sum::<f64>().abs());
        scales.push(terms.iter().map(|t| t.abs()).sum());
    }
    let max_relative = residuals
        .iter()
        .zip(&scales)
        .map(|(r, s)| if *s > 0.0 { r / s } else { 0.0 })
        .fold(0.0, f64::max);
    Ok(BvReport { residuals, scales, max_relative })
}
