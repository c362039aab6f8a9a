//! Graph Laplacians on cells joined through facets, solved per connected component.

use std::collections::BTreeMap;

use crate::domain::{Facet, FacetSide, Grid};
use crate::error::{Error, Result};

use super::data::compatible;

/// Cell graph: `nodes` are the cells taking part, and two nodes are joined
/// through every shared facet that is not cut.
pub(crate) struct CellGraph {
    /// Node index of each grid cell, if any.
    pub node_of: Vec<Option<usize>>,
    pub cells: Vec<usize>,
    pub offsets: Vec<usize>,
    pub neighbors: Vec<usize>,
    pub component: Vec<usize>,
    pub components: usize,
}

impl CellGraph {
    pub fn new(grid: &Grid, nodes: impl Fn(usize) -> bool, cut: impl Fn(Facet) -> bool) -> CellGraph {
        let cells: Vec<usize> = (0..grid.cell_count()).filter(|&c| nodes(c)).collect();
        let mut node_of = vec![None; grid.cell_count()];
        for (i, &c) in cells.iter().enumerate() {
            node_of[c] = Some(i);
        }
        let mut offsets = Vec::with_capacity(cells.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for &c in &cells {
            for fs in grid.cell_faces(c) {
                if cut(fs.facet) {
                    continue;
                }
                if let Some(j) = grid.facet_cell(fs.facet, fs.side.opposite()).and_then(|n| node_of[n]) {
                    neighbors.push(j);
                }
            }
            offsets.push(neighbors.len());
        }
        let mut component = vec![usize::MAX; cells.len()];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..cells.len() {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = components;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for &j in &neighbors[offsets[i]..offsets[i + 1]] {
                    if component[j] == usize::MAX {
                        component[j] = components;
                        stack.push(j);
                    }
                }
            }
            components += 1;
        }
        CellGraph { node_of, cells, offsets, neighbors, component, components }
    }

    fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let nb = &self.neighbors[self.offsets[i]..self.offsets[i + 1]];
            *o = nb.len() as f64 * x[i] - nb.iter().map(|&j| x[j]).sum::<f64>();
        }
    }

    /// Right-hand side `-sum g` over the sides of each node.
    pub fn sources(&self, grid: &Grid, g: &BTreeMap<FacetSide, f64>) -> Vec<f64> {
        let mut b = vec![0.0; self.cells.len()];
        for (fs, v) in g {
            if let Some(i) = grid.facet_cell(fs.facet, fs.side).and_then(|c| self.node_of[c]) {
                b[i] -= v;
            }
        }
        b
    }

    /// Fails unless the sources of every component sum to zero.
    pub fn check_compatible(&self, b: &[f64], area: f64) -> Result<()> {
        let mut sum = vec![0.0; self.components];
        let mut abs = vec![0.0; self.components];
        for (i, v) in b.iter().enumerate() {
            sum[self.component[i]] += v * area;
            abs[self.component[i]] += v.abs() * area;
        }
        for k in 0..self.components {
            if !compatible(sum[k], abs[k]) {
                return Err(Error::Compatibility(format!(
                    "prescribed flux on component {k} integrates to {:e} instead of 0",
                    -sum[k]
                )));
            }
        }
        Ok(())
    }

    /// Solves `L u = b` with mean-zero `u` on each component by Jacobi
    /// preconditioned conjugate gradients, until the largest residual is
    /// below `tol` and the summed residual times `area` is too.
    pub fn solve(&self, b: &[f64], tol: f64, area: f64) -> Result<(Vec<f64>, usize)> {
        let n = self.cells.len();
        let mut rhs = b.to_vec();
        self.project(&mut rhs);
        let mut u = vec![0.0; n];
        let mut r = rhs.clone();
        let inv: Vec<f64> = (0..n).map(|i| if self.degree(i) > 0 { 1.0 / self.degree(i) as f64 } else { 0.0 }).collect();
        let mut z: Vec<f64> = r.iter().zip(&inv).map(|(a, b)| a * b).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let done = |r: &[f64]| {
            let max = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let sum: f64 = r.iter().map(|v| v.abs()).sum();
            max <= tol && sum * area <= tol
        };
        let limit = 20 * n + 1000;
        let mut iterations = 0;
        while !done(&r) {
            if iterations >= limit {
                return Err(Error::Solver(format!("conjugate gradients did not converge in {limit} iterations")));
            }
            iterations += 1;
            self.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                u[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if iterations % 64 == 0 {
                self.apply(&u, &mut ap);
                for i in 0..n {
                    r[i] = rhs[i] - ap[i];
                }
            }
            for i in 0..n {
                z[i] = r[i] * inv[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        self.project(&mut u);
        Ok((u, iterations))
    }

    /// Removes the mean on each component.
    fn project(&self, v: &mut [f64]) {
        let mut sum = vec![0.0; self.components];
        let mut count = vec![0usize; self.components];
        for (i, x) in v.iter().enumerate() {
            sum[self.component[i]] += x;
            count[self.component[i]] += 1;
        }
        for (i, x) in v.iter_mut().enumerate() {
            let k = self.component[i];
            *x -= sum[k] / count[k] as f64;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
