//! Radial mollifier and discrete convolution on grids.

use rayon::prelude::*;

use crate::domain::{Grid, RoughSet};
use crate::error::{Error, Result};

/// Discrete radial mollifier with profile `(1 - r^2/eps^2)^3`, normalized to unit mass.
#[derive(Clone, Debug)]
pub struct MollifierKernel {
    radius: f64,
    taps: Vec<([i64; 3], f64)>,
}

impl MollifierKernel {
    /// Kernel of support radius `radius`, which must be at least two cells.
    pub fn new(grid: &Grid, radius: f64) -> Result<MollifierKernel> {
        let h = grid.spacing();
        if !(radius >= 2.0 * h * (1.0 - 1e-12)) {
            return Err(Error::BelowResolution { radius, limit: 2.0 * h });
        }
        let mut taps: Vec<([i64; 3], f64)> = grid
            .ball_offsets(radius)
            .into_iter()
            .filter_map(|o| {
                let r2 = (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]) as f64 * h * h;
                let w = (1.0 - r2 / (radius * radius)).max(0.0).powi(3);
                (w > 0.0).then_some((o, w))
            })
            .collect();
        let mass: f64 = taps.iter().map(|t| t.1).sum();
        for t in &mut taps {
            t.1 /= mass;
        }
        Ok(MollifierKernel { radius, taps })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn taps(&self) -> &[([i64; 3], f64)] {
        &self.taps
    }

    /// Convolves a cell field; cells beyond the grid read as `outside`.
    pub fn convolve(&self, grid: &Grid, values: &[f64], outside: f64) -> Vec<f64> {
        (0..grid.cell_count())
            .into_par_iter()
            .map(|c| {
                let m = grid.cell_multi(c);
                self.taps
                    .iter()
                    .map(|(o, w)| {
                        let t = [m[0] as i64 + o[0], m[1] as i64 + o[1], m[2] as i64 + o[2]];
                        w * grid.cell_at(t).map_or(outside, |i| values[i])
                    })
                    .sum()
            })
            .collect()
    }

    pub fn smooth_indicator(&self, set: &RoughSet) -> Vec<f64> {
        let v: Vec<f64> = set.cells().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        self.convolve(set.grid(), &v, 0.0)
    }
}

/// Central-difference gradient of a cell field at one cell.
pub fn central_gradient(grid: &Grid, values: &[f64], cell: usize, outside: f64) -> [f64; 3] {
    let h = grid.spacing();
    let mut g = [0.0; 3];
    for (a, ga) in g.iter_mut().enumerate().take(grid.dim()) {
        let up = grid.neighbor(cell, a, 1).map_or(outside, |i| values[i]);
        let dn = grid.neighbor(cell, a, -1).map_or(outside, |i| values[i]);
        *ga = (up - dn) / (2.0 * h);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass() {
        let g = Grid::new(0.1, &[0.0, 0.0], &[10, 10]).unwrap();
        let k = MollifierKernel::new(&g, 0.4).unwrap();
        let s: f64 = k.taps().iter().map(|t| t.1).sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert!(MollifierKernel::new(&g, 0.15).is_err());
    }

    #[test]
    fn constants_are_fixed() {
        let g = Grid::new(0.1, &[0.0, 0.0], &[12, 12]).unwrap();
        let k = MollifierKernel::new(&g, 0.3).unwrap();
        let w = k.convolve(&g, &vec![2.5; g.cell_count()], 2.5);
        assert!(w.iter().all(|x| (x - 2.5).abs() < 1e-13));
    }

    #[test]
    fn linear_fields_are_fixed() {
        let g = Grid::new(0.1, &[0.0, 0.0], &[20, 20]).unwrap();
        let k = MollifierKernel::new(&g, 0.4).unwrap();
        let v: Vec<f64> = (0..g.cell_count()).map(|c| g.cell_center(c)[0] * 3.0).collect();
        let w = k.convolve(&g, &v, 0.0);
        let mid = g.cell_index([10, 10, 0]);
        assert!((w[mid] - v[mid]).abs() < 1e-12);
        let grad = central_gradient(&g, &w, mid, 0.0);
        assert!((grad[0] - 3.0).abs() < 1e-10 && grad[1].abs() < 1e-10);
    }
}
