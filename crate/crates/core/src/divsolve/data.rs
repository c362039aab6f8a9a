//! Prescribed normal traces and their CSV form.

use std::collections::BTreeMap;

use crate::dmfield::TraceMeasure;
use crate::domain::{Facet, FacetKind, FacetSide, Grid, RoughSet, Side};
use crate::error::{Error, Result};
use crate::io::fmt_f64;

/// Outgoing flux density prescribed on facet sides of the boundary and the cracks.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceData {
    grid: Grid,
    pub values: BTreeMap<FacetSide, f64>,
}

impl TraceData {
    pub fn new(grid: &Grid) -> TraceData {
        TraceData { grid: grid.clone(), values: BTreeMap::new() }
    }

    /// Densities of a measured trace.
    pub fn from_trace(trace: &TraceMeasure) -> TraceData {
        let area = trace.grid().facet_area();
        TraceData { grid: trace.grid().clone(), values: trace.atoms.iter().map(|(&fs, &w)| (fs, w / area)).collect() }
    }

    /// Fills every boundary and crack side of `set` with `g(x, outward normal)`.
    pub fn from_fn(set: &RoughSet, g: impl Fn(&crate::domain::Point, [f64; 3]) -> f64) -> TraceData {
        let grid = set.grid();
        let mut out = TraceData::new(grid);
        for fs in set.inner_sides() {
            let mut normal = [0.0; 3];
            normal[fs.facet.axis as usize] = fs.side.outward_sign();
            out.values.insert(fs, g(&grid.facet_center(fs.facet), normal));
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn get(&self, fs: FacetSide) -> f64 {
        self.values.get(&fs).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, fs: FacetSide, g: f64) {
        self.values.insert(fs, g);
    }

    /// `sum g * facet area`.
    pub fn integral(&self) -> f64 {
        self.values.values().sum::<f64>() * self.grid.facet_area()
    }

    /// `sum |g| * facet area`.
    pub fn abs_integral(&self) -> f64 {
        self.values.values().map(|g| g.abs()).sum::<f64>() * self.grid.facet_area()
    }

    pub fn sup(&self) -> f64 {
        self.values.values().fold(0.0, |m, g| m.max(g.abs()))
    }

    /// Fails unless every prescribed side is the set side of a boundary facet or a crack side.
    pub fn check_support(&self, set: &RoughSet) -> Result<()> {
        if &self.grid != set.grid() {
            return Err(Error::GridMismatch("trace data and set live on different grids".into()));
        }
        for fs in self.values.keys() {
            let ok = match set.facet_kind(fs.facet) {
                FacetKind::Crack => true,
                FacetKind::Boundary { inside } => inside == fs.side,
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "facet {} side {:?} is not on the boundary or a crack",
                    self.grid.global_facet_id(fs.facet),
                    fs.side
                )));
            }
        }
        Ok(())
    }

    /// `facet_id,side,g` with the global facet id and `lower` or `upper`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("facet_id,side,g\n");
        for (fs, g) in &self.values {
            let side = match fs.side {
                Side::Lower => "lower",
                Side::Upper => "upper",
            };
            out.push_str(&format!("{},{},{}\n", self.grid.global_facet_id(fs.facet), side, fmt_f64(*g)));
        }
        out
    }

    pub fn from_csv(grid: &Grid, text: &str) -> Result<TraceData> {
        let mut out = TraceData::new(grid);
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (n == 0 && line.starts_with("facet_id")) {
                continue;
            }
            let bad = |message: String| Error::Parse { line: n + 1, column: 1, message };
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", parts.len())));
            }
            let id: u64 = parts[0].parse().map_err(|_| bad(format!("bad facet id {:?}", parts[0])))?;
            let facet: Facet = grid.facet_from_global(id).ok_or_else(|| bad(format!("facet id {id} is outside the grid")))?;
            let side = match parts[1] {
                "lower" | "0" => Side::Lower,
                "upper" | "1" => Side::Upper,
                s => return Err(bad(format!("bad side {s:?}"))),
            };
            let g: f64 = parts[2].parse().map_err(|_| bad(format!("bad value {:?}", parts[2])))?;
            if !g.is_finite() {
                return Err(bad("trace values must be finite".into()));
            }
            out.values.insert(FacetSide::new(facet, side), g);
        }
        Ok(out)
    }
}

/// Integral of the prescribed trace; zero for solvable data.
pub fn compatibility_check(g: &TraceData) -> f64 {
    g.integral()
}

/// Tolerance on the integral of a sum of `g` values with absolute total `abs`.
pub(crate) fn compatible(integral: f64, abs: f64) -> bool {
    integral.abs() <= 1e-10 * (abs + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Preset;

    #[test]
    fn csv_round_trip_and_integrals() {
        let grid = Preset::Square.grid(8).unwrap();
        let s = Preset::Square.rasterize(&grid).unwrap();
        let t = TraceData::from_fn(&s, |_, n| -n[0]);
        assert!(compatibility_check(&t).abs() < 1e-14);
        assert!((t.abs_integral() - 4.0).abs() < 1e-12);
        let back = TraceData::from_csv(&grid, &t.to_csv()).unwrap();
        assert_eq!(back, t);
        t.check_support(&s).unwrap();
        let ones = TraceData::from_fn(&s, |_, _| 1.0);
        assert!((compatibility_check(&ones) - 8.0).abs() < 1e-12);
        assert!(TraceData::from_csv(&grid, "facet_id,side,g\n1,sideways,2\n").is_err());
    }
}
