//! Named test domains with known measures.

use std::f64::consts::PI;

use serde::Serialize;

use super::grid::Grid;
use super::raster::rasterize;
use super::set::RoughSet;
use super::spec::{Crack, DomainSpec, Shape};
use crate::error::{Error, Result};

/// Empty cells around preset grids; enough for radius-8 stencils plus a gradient.
pub const PRESET_MARGIN: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `(-1,1)^2` cut along `(-1,1) x {0}`.
    SlitSquare,
    /// Unit disk cut along `[0,1) x {0}`.
    SlitDisk,
    /// Disk of radius 2 with the boundaries of the `4^k` generation-`k` squares
    /// of the product Cantor set removed as cracks.
    CantorCross(u32),
    /// Unit disk.
    Disk,
    /// `(-1,1)^2`.
    Square,
    /// `(-1,1)^2` without its lower right quadrant.
    LShape,
}

/// Exact measures of a preset domain.
#[derive(Clone, Debug, Serialize)]
pub struct Reference {
    pub name: String,
    pub area: f64,
    /// Perimeter of the measure-theoretic boundary.
    pub perimeter: f64,
    /// Hausdorff measure of the boundary minus its density-zero part.
    pub star_measure: f64,
    pub provenance: &'static str,
}

impl Preset {
    pub const ALL_NAMES: [&'static str; 6] = ["slit-square", "slit-disk", "cantor-cross", "disk", "square", "l-shape"];

    pub fn from_name(name: &str, k: Option<u32>) -> Result<Preset> {
        Ok(match name {
            "slit-square" => Preset::SlitSquare,
            "slit-disk" => Preset::SlitDisk,
            "cantor-cross" => Preset::CantorCross(k.unwrap_or(2)),
            "disk" => Preset::Disk,
            "square" => Preset::Square,
            "l-shape" => Preset::LShape,
            other => return Err(Error::InvalidDomain(format!("unknown preset {other:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::SlitSquare => "slit-square",
            Preset::SlitDisk => "slit-disk",
            Preset::CantorCross(_) => "cantor-cross",
            Preset::Disk => "disk",
            Preset::Square => "square",
            Preset::LShape => "l-shape",
        }
    }

    pub fn spec(&self) -> DomainSpec {
        let square = Shape::Box { min: [-1.0, -1.0, 0.0], max: [1.0, 1.0, 0.0] };
        let disk = |r| Shape::Ball { center: [0.0; 3], radius: r };
        let mut spec = match *self {
            Preset::SlitSquare => DomainSpec::new(square, 2).with_crack(Crack::Segment { from: [-1.0, 0.0], to: [1.0, 0.0] }),
            Preset::SlitDisk => DomainSpec::new(disk(1.0), 2).with_crack(Crack::Segment { from: [0.0, 0.0], to: [1.0, 0.0] }),
            Preset::CantorCross(k) => {
                let mut s = DomainSpec::new(disk(2.0), 2);
                s.cracks = cantor_square_edges(k);
                s
            }
            Preset::Disk => DomainSpec::new(disk(1.0), 2),
            Preset::Square => DomainSpec::new(square, 2),
            Preset::LShape => DomainSpec::new(
                Shape::Diff(vec![square, Shape::Box { min: [0.0, -1.5, 0.0], max: [1.5, 0.0, 0.0] }]),
                2,
            ),
        };
        spec.preset = Some(*self);
        spec
    }

    /// Grid of the given resolution covering the preset with a margin of
    /// [`PRESET_MARGIN`] cells.
    pub fn grid(&self, cells_per_unit: usize) -> Result<Grid> {
        let (lo, hi) = self.spec().shape.bounds();
        Grid::covering(&lo[..2], &hi[..2], 1.0 / cells_per_unit as f64, PRESET_MARGIN)
    }

    /// Rasterizes the preset; the Cantor cross needs cells no larger than its smallest squares.
    pub fn rasterize(&self, grid: &Grid) -> Result<RoughSet> {
        if let Preset::CantorCross(k) = *self {
            let side = 3f64.powi(-(k as i32));
            if grid.spacing() > side * (1.0 + 1e-9) {
                return Err(Error::GridTooCoarse(format!(
                    "generation {k} squares of side {side} need spacing at most {side}, got {}",
                    grid.spacing()
                )));
            }
        }
        rasterize(&self.spec(), grid)
    }

    pub fn reference(&self) -> Reference {
        let (area, perimeter, star, provenance) = match *self {
            Preset::SlitSquare => (4.0, 8.0, 10.0, "analytic: square sides plus slit of length 2"),
            Preset::SlitDisk => (PI, 2.0 * PI, 2.0 * PI + 1.0, "analytic: circle plus slit of length 1"),
            Preset::CantorCross(k) => (
                4.0 * PI,
                4.0 * PI,
                4.0 * PI + cantor_crack_length(k),
                "analytic: circle of radius 2 plus 4^k square boundaries of side 3^-k",
            ),
            Preset::Disk => (PI, 2.0 * PI, 2.0 * PI, "analytic"),
            Preset::Square => (4.0, 8.0, 8.0, "analytic"),
            Preset::LShape => (3.0, 8.0, 8.0, "analytic"),
        };
        Reference {
            name: self.name().into(),
            area,
            perimeter,
            star_measure: star,
            provenance,
        }
    }

    /// The six gallery presets, with the Cantor cross at generation `k`.
    pub fn gallery(k: u32) -> [Preset; 6] {
        [
            Preset::SlitSquare,
            Preset::SlitDisk,
            Preset::CantorCross(k),
            Preset::Disk,
            Preset::Square,
            Preset::LShape,
        ]
    }
}

/// Total length of the generation-`k` square boundaries: `4 (4/3)^k`.
pub fn cantor_crack_length(k: u32) -> f64 {
    4.0 * (4.0f64 / 3.0).powi(k as i32)
}

/// Left endpoints of the `2^k` generation-`k` intervals of the middle-thirds set.
pub fn cantor_intervals(k: u32) -> Vec<f64> {
    let mut starts = vec![0.0];
    let mut len = 1.0;
    for _ in 0..k {
        len /= 3.0;
        starts = starts.iter().flat_map(|&s| [s, s + 2.0 * len]).collect();
    }
    starts
}

fn cantor_square_edges(k: u32) -> Vec<Crack> {
    let side = 3f64.powi(-(k as i32));
    let starts = cantor_intervals(k);
    let mut out = Vec::with_capacity(4 * starts.len() * starts.len());
    for &y in &starts {
        for &x in &starts {
            let (x1, y1) = (x + side, y + side);
            out.push(Crack::Segment { from: [x, y], to: [x1, y] });
            out.push(Crack::Segment { from: [x1, y], to: [x1, y1] });
            out.push(Crack::Segment { from: [x1, y1], to: [x, y1] });
            out.push(Crack::Segment { from: [x, y1], to: [x, y] });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slit_square_cells_and_cracks() {
        let g = Preset::SlitSquare.grid(4).unwrap();
        let s = Preset::SlitSquare.rasterize(&g).unwrap();
        assert_eq!(s.count(), 64);
        assert_eq!(s.cracks().len(), 8);
        let g = Preset::SlitSquare.grid(2).unwrap();
        assert_eq!(Preset::SlitSquare.rasterize(&g).unwrap().cracks().len(), 4);
    }

    #[test]
    fn cantor_lengths() {
        for k in 1..=2u32 {
            let n = 4 * 3usize.pow(k);
            let g = Preset::CantorCross(k).grid(n).unwrap();
            let s = Preset::CantorCross(k).rasterize(&g).unwrap();
            let count_len = s.cracks().len() as f64 * g.spacing();
            assert!((count_len - cantor_crack_length(k)).abs() < 1e-9);
        }
        assert!((cantor_crack_length(1) - 16.0 / 3.0).abs() < 1e-15);
        assert_eq!(cantor_crack_length(0), 4.0);
    }

    #[test]
    fn cantor_needs_fine_grid() {
        let g = Preset::CantorCross(2).grid(4).unwrap();
        assert!(matches!(Preset::CantorCross(2).rasterize(&g), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn names_roundtrip() {
        for n in Preset::ALL_NAMES {
            assert_eq!(Preset::from_name(n, None).unwrap().name(), n);
        }
    }
}
