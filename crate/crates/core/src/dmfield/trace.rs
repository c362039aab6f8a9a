//! Normal traces on the boundary and the bounds they satisfy.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::divergence::{check_grid, divergence_measure, divergence_measure_full, extend_by_zero};
use super::field::FluxField;
use super::pairing::{pairing, Quadrature};
use super::testfn::TestFunction;
use crate::domain::{Facet, FacetKind, FacetSide, Grid, RoughSet, Side};
use crate::error::{Error, Result};
use crate::measure::star_measure;

/// Interior normal trace on the boundary and cracks of a set.
///
/// Atoms are keyed by facet side: the set side of boundary facets and both
/// sides of cracks. Each weight is the outgoing flux times the facet area.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceMeasure {
    grid: Grid,
    pub atoms: BTreeMap<FacetSide, f64>,
}

#[derive(Serialize)]
struct AtomRow {
    axis: u8,
    index: usize,
    side: Side,
    weight: f64,
    density: f64,
}

impl Serialize for TraceMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let area = self.grid.facet_area();
        let rows: Vec<AtomRow> = self
            .atoms
            .iter()
            .map(|(fs, &w)| AtomRow { axis: fs.facet.axis, index: fs.facet.index, side: fs.side, weight: w, density: w / area })
            .collect();
        rows.serialize(s)
    }
}

impl TraceMeasure {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Trace density on one facet side.
    pub fn density(&self, fs: FacetSide) -> Option<f64> {
        self.atoms.get(&fs).map(|w| w / self.grid.facet_area())
    }

    /// Density per facet with both sides of a crack added up.
    pub fn facet_densities(&self) -> BTreeMap<Facet, f64> {
        let area = self.grid.facet_area();
        let mut out = BTreeMap::new();
        for (fs, w) in &self.atoms {
            *out.entry(fs.facet).or_insert(0.0) += w / area;
        }
        out
    }

    /// Largest facet density, with the facet where it occurs.
    pub fn g_infinity(&self) -> (f64, Option<Facet>) {
        self.facet_densities()
            .into_iter()
            .fold((0.0, None), |best, (f, d)| if d.abs() > best.0 { (d.abs(), Some(f)) } else { best })
    }

    pub fn total(&self) -> f64 {
        self.atoms.values().sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.facet_densities().values().map(|d| d.abs()).sum::<f64>() * self.grid.facet_area()
    }

    /// Integral of `phi` against the trace.
    pub fn pair(&self, phi: impl Fn(&crate::domain::Point) -> f64) -> f64 {
        self.atoms.iter().map(|(fs, w)| w * phi(&self.grid.facet_center(fs.facet))).sum()
    }
}

/// Normal trace of `field` on the boundary of `set`, read off the divergence
/// of the field extended by zero to `bbox`.
///
/// On every facet the trace atoms add up to minus the jump atom of the
/// extended divergence.
pub fn trace_measure(field: &FluxField, set: &RoughSet, bbox: &Grid) -> Result<TraceMeasure> {
    let (ext, inner) = extend_by_zero(field, set, bbox)?;
    let jumps = divergence_measure_full(&ext);
    let off = set.grid().offset_in(bbox)?;
    let back = [-off[0], -off[1], -off[2]];
    let area = bbox.facet_area();
    let mut atoms = BTreeMap::new();
    for f in inner.two_sided_facets() {
        let sides: Vec<Side> = match inner.facet_kind(f) {
            FacetKind::Crack => vec![Side::Lower, Side::Upper],
            FacetKind::Boundary { inside } => vec![inside],
            _ => continue,
        };
        let local = bbox.translate_facet(f, set.grid(), back).expect("set facets lie in the set grid");
        let mut sum = 0.0;
        for s in sides {
            let w = ext.outgoing(FacetSide::new(f, s)) * area;
            sum += w;
            atoms.insert(FacetSide::new(local, s), w);
        }
        let jump = jumps.facet_atoms.get(&f).copied().unwrap_or(0.0);
        debug_assert!((sum + jump).abs() <= 1e-12 * (1.0 + jump.abs()));
    }
    Ok(TraceMeasure { grid: set.grid().clone(), atoms })
}

/// `|pairing(field, phi) - trace(phi)|`, the defect of the Gauss-Green formula.
pub fn gauss_green_residual(
    field: &FluxField,
    set: &RoughSet,
    phi: &TestFunction,
    trace: &TraceMeasure,
    quadrature: Quadrature,
) -> Result<f64> {
    let lhs = pairing(field, set, phi, quadrature)?;
    Ok((lhs - trace.pair(|x| phi.value(x))).abs())
}

/// Bound on `g_infinity / sup|F|` guaranteed for every bounded field.
pub const C_CHECK: f64 = 4.0;

#[derive(Clone, Debug, Serialize)]
pub struct LinfReport {
    pub g_infinity: f64,
    pub sup_bound: f64,
    pub ratio: f64,
    pub worst: Option<Facet>,
    pub passed: bool,
}

pub fn trace_linfinity_check(trace: &TraceMeasure, field: &FluxField) -> LinfReport {
    let (g, worst) = trace.g_infinity();
    let ratio = if field.sup_bound() > 0.0 { g / field.sup_bound() } else { 0.0 };
    LinfReport { g_infinity: g, sup_bound: field.sup_bound(), ratio, worst, passed: g <= C_CHECK * field.sup_bound() * (1.0 + 1e-12) }
}

/// Constant in the bound on the divergence of the zero extension.
pub const C_EXT: f64 = 2.0;

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    /// Total variation of the divergence of the zero extension.
    pub lhs: f64,
    /// Total variation inside plus `sup|F|` times the boundary measure.
    pub rhs: f64,
    pub ratio: f64,
    pub passed: bool,
}

pub fn extension_bound_check(field: &FluxField, set: &RoughSet, bbox: &Grid) -> Result<ExtensionReport> {
    check_grid(field, set)?;
    let (ext, _) = extend_by_zero(field, set, bbox)?;
    let lhs = divergence_measure_full(&ext).total_variation();
    let rhs = divergence_measure(field, set)?.total_variation() + field.sup_bound() * star_measure(set);
    if rhs == 0.0 && lhs > 0.0 {
        return Err(Error::InvalidArgument("zero bound for a nonzero field".into()));
    }
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(ExtensionReport { lhs, rhs, ratio, passed: lhs <= C_EXT * rhs * (1.0 + 1e-12) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmfield::sample_field;
    use crate::domain::Preset;

    #[test]
    fn unit_flow_through_square() {
        let g = Preset::Square.grid(8).unwrap();
        let s = Preset::Square.rasterize(&g).unwrap();
        let f = sample_field(|_| [1.0, 0.0, 0.0], &s, 1.0).unwrap();
        let t = trace_measure(&f, &s, &g).unwrap();
        for fs in t.atoms.keys() {
            let d = t.density(*fs).unwrap();
            let x = g.facet_center(fs.facet);
            let expect = if fs.facet.axis == 1 { 0.0 } else { x[0].signum() };
            assert_eq!(d, expect);
        }
        assert!(t.total().abs() < 1e-14);
    }
}
