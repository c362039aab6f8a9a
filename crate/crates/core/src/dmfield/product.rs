//! Product rule for a bounded function times a divergence-measure field.

use serde::Serialize;

use super::divergence::check_grid;
use super::field::FluxField;
use super::testfn::TestFunction;
use crate::approx::{central_gradient, MollifierKernel};
use crate::domain::RoughSet;
use crate::error::{Error, Result};
use crate::measure::loglog_slope;

#[derive(Clone, Debug, Serialize)]
pub struct ProductRow {
    pub eps: f64,
    /// `|<div(gF), phi> - int g_eps phi d(div F) - int phi F . grad(g_eps)|` per test function.
    pub residuals: Vec<f64>,
    /// `int |F . grad(g_eps)|`.
    pub variation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub rows: Vec<ProductRow>,
    /// Fitted order of the largest residual in `eps`.
    pub order: f64,
    /// Largest `int |grad(g_eps)|` over the ladder.
    pub reference_variation: f64,
    /// Largest cell-centered `|F|`.
    pub field_sup: f64,
    /// Whether every `variation <= 1.01 * field_sup * reference_variation`.
    pub bound_ok: bool,
}

/// Checks `div(gF) = g* div F + F . Dg` on test functions supported inside
/// `set`, with `g*` the mollified `g` and `Dg` its mollified gradient.
pub fn product_rule_check(
    field: &FluxField,
    g_cells: &[f64],
    set: &RoughSet,
    basis: &[TestFunction],
    ladder: &[f64],
) -> Result<ProductReport> {
    check_grid(field, set)?;
    let grid = set.grid();
    if g_cells.len() != grid.cell_count() {
        return Err(Error::GridMismatch("function values do not match the grid".into()));
    }
    if g_cells.iter().any(|v| !v.is_finite()) {
        return Err(Error::UnboundedField("the multiplier must be finite everywhere".into()));
    }
    if ladder.len() < 2 {
        return Err(Error::InvalidArgument("need at least two radii".into()));
    }
    let vol = grid.cell_volume();
    let area = grid.facet_area();
    let cells: Vec<usize> = (0..grid.cell_count()).filter(|&c| set.contains(c)).collect();
    let vectors: Vec<[f64; 3]> = cells.iter().map(|&c| field.cell_vector(c)).collect();
    let divs: Vec<f64> = cells.iter().map(|&c| field.cell_balance(c) * area).collect();
    let field_sup = vectors.iter().map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()).fold(0.0, f64::max);
    let lhs: Vec<f64> = basis
        .iter()
        .map(|phi| {
            cells
                .iter()
                .zip(&vectors)
                .map(|(&c, v)| {
                    let d = phi.gradient(&grid.cell_center(c));
                    -g_cells[c] * (v[0] * d[0] + v[1] * d[1] + v[2] * d[2]) * vol
                })
                .sum()
        })
        .collect();
    let mut rows = Vec::new();
    let mut reference_variation = 0.0f64;
    for &eps in ladder {
        let ge = MollifierKernel::new(grid, eps)?.convolve(grid, g_cells, 0.0);
        let grads: Vec<[f64; 3]> = cells.iter().map(|&c| central_gradient(grid, &ge, c, 0.0)).collect();
        let variation: f64 = vectors.iter().zip(&grads).map(|(v, d)| (v[0] * d[0] + v[1] * d[1] + v[2] * d[2]).abs() * vol).sum();
        let total: f64 = grads.iter().map(|d| (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() * vol).sum();
        reference_variation = reference_variation.max(total);
        let residuals = basis
            .iter()
            .zip(&lhs)
            .map(|(phi, l)| {
                let mut t2 = 0.0;
                let mut t3 = 0.0;
                for (k, &c) in cells.iter().enumerate() {
                    let p = phi.value(&grid.cell_center(c));
                    let (v, d) = (vectors[k], grads[k]);
                    t2 += ge[c] * p * divs[k];
                    t3 += p * (v[0] * d[0] + v[1] * d[1] + v[2] * d[2]) * vol;
                }
                (l - t2 - t3).abs()
            })
            .collect();
        rows.push(ProductRow { eps, residuals, variation });
    }
    let worst: Vec<f64> = rows.iter().map(|r| r.residuals.iter().cloned().fold(0.0, f64::max)).collect();
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let order = loglog_slope(&eps, &worst);
    let bound_ok = rows.iter().all(|r| r.variation <= 1.01 * field_sup * reference_variation);
    Ok(ProductReport { rows, order, reference_variation, field_sup, bound_ok })
}
