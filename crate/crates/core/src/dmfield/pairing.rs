//! Weak pairing of a field with a test function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::divergence::check_grid;
use super::field::FluxField;
use super::testfn::TestFunction;
use crate::domain::{FacetKind, FacetSide, RoughSet, Side};
use crate::error::Result;

/// How `F . grad(phi)` is integrated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    /// Differences of `phi` between cell centers and facet centers.
    /// Summation by parts holds exactly, so the Gauss-Green residual is round-off.
    #[default]
    Mimetic,
    /// Exact gradients at facet centers and half-cell midpoints.
    /// Consistent to second order for smooth data.
    Analytic,
}

/// `int_set phi d(div F) + int_set F . grad(phi) dx`.
pub fn pairing(field: &FluxField, set: &RoughSet, phi: &TestFunction, quadrature: Quadrature) -> Result<f64> {
    check_grid(field, set)?;
    let g = set.grid();
    let h = g.spacing();
    let area = g.facet_area();
    let vol = g.cell_volume();
    let per_cell: Vec<f64> = (0..g.cell_count())
        .into_par_iter()
        .filter(|&c| set.contains(c))
        .map(|c| {
            let xc = g.cell_center(c);
            let phic = phi.value(&xc);
            let mut acc = phic * field.cell_balance(c) * area;
            for fs in g.cell_faces(c) {
                let f = fs.facet;
                let a = f.axis as usize;
                match set.facet_kind(f) {
                    FacetKind::Interior => {
                        // each interior facet is handled once, by its lower cell
                        if fs.side != Side::Lower {
                            continue;
                        }
                        let v = field.side_value(f, Side::Lower);
                        acc += match quadrature {
                            Quadrature::Mimetic => {
                                let up = g.facet_cell(f, Side::Upper).unwrap();
                                v * (phi.value(&g.cell_center(up)) - phic) * area
                            }
                            Quadrature::Analytic => v * phi.gradient(&g.facet_center(f))[a] * vol,
                        };
                    }
                    FacetKind::Crack | FacetKind::Boundary { .. } => {
                        let xf = g.facet_center(f);
                        acc += match quadrature {
                            Quadrature::Mimetic => field.outgoing(FacetSide::new(f, fs.side)) * (phi.value(&xf) - phic) * area,
                            Quadrature::Analytic => {
                                let mut mid = xf;
                                mid[a] -= fs.side.outward_sign() * 0.25 * h;
                                field.side_value(f, fs.side) * phi.gradient(&mid)[a] * 0.5 * vol
                            }
                        };
                    }
                    FacetKind::Exterior => {}
                }
            }
            acc
        })
        .collect();
    Ok(per_cell.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmfield::{random_field, trace_measure};
    use crate::domain::Preset;

    #[test]
    fn mimetic_summation_by_parts_is_exact() {
        let g = Preset::SlitDisk.grid(16).unwrap();
        let s = Preset::SlitDisk.rasterize(&g).unwrap();
        let f = random_field(&s, 11, 1.0);
        let t = trace_measure(&f, &s, &g).unwrap();
        let phi = TestFunction::bump([0.3, 0.1, 0.0], 1.5);
        let lhs = pairing(&f, &s, &phi, Quadrature::Mimetic).unwrap();
        let rhs = t.pair(|x| phi.value(x));
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()), "{lhs} {rhs}");
    }
}
