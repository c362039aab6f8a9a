//! Uniform Cartesian grids and the facets between their cells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in space. Unused trailing coordinates are zero.
pub type Point = [f64; 3];

/// Which side of a facet a cell or a one-sided value lives on.
///
/// Facet normals always point along `+e_axis`, so the lower side is the
/// cell with the smaller coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Lower => Side::Upper,
            Side::Upper => Side::Lower,
        }
    }

    /// Sign of the outward normal of the cell on this side relative to `+e_axis`.
    pub fn outward_sign(self) -> f64 {
        match self {
            Side::Lower => 1.0,
            Side::Upper => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Lower => 0,
            Side::Upper => 1,
        }
    }
}

/// A grid facet: `index` is the linear position of its base multi-index
/// inside the facet array of `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub axis: u8,
    pub index: usize,
}

/// One side of a facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FacetSide {
    pub facet: Facet,
    pub side: Side,
}

impl FacetSide {
    pub fn new(facet: Facet, side: Side) -> Self {
        FacetSide { facet, side }
    }
}

/// A uniform grid of `extents` cells of edge `spacing` starting at `origin`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDoc", into = "GridDoc")]
pub struct Grid {
    dim: usize,
    spacing: f64,
    origin: Point,
    extents: [usize; 3],
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    n: usize,
    spacing: f64,
    origin: Vec<f64>,
    extents: Vec<usize>,
}

impl TryFrom<GridDoc> for Grid {
    type Error = Error;
    fn try_from(doc: GridDoc) -> Result<Grid> {
        if doc.origin.len() != doc.n {
            return Err(Error::InvalidArgument(format!(
                "grid of dimension {} has {} origin coordinates",
                doc.n,
                doc.origin.len()
            )));
        }
        Grid::new(doc.spacing, &doc.origin, &doc.extents)
    }
}

impl From<Grid> for GridDoc {
    fn from(g: Grid) -> GridDoc {
        GridDoc {
            n: g.dim,
            spacing: g.spacing,
            origin: g.origin[..g.dim].to_vec(),
            extents: g.extents[..g.dim].to_vec(),
        }
    }
}

impl Grid {
    pub fn new(spacing: f64, origin: &[f64], extents: &[usize]) -> Result<Grid> {
        let dim = extents.len();
        if !(2..=3).contains(&dim) || origin.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "grids must be 2D or 3D with matching origin, got {} extents and {} origin coordinates",
                dim,
                origin.len()
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidArgument(format!("grid spacing {spacing} must be positive")));
        }
        if extents.contains(&0) || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidArgument("grid extents must be positive and origin finite".into()));
        }
        let mut o = [0.0; 3];
        let mut e = [1; 3];
        o[..dim].copy_from_slice(origin);
        e[..dim].copy_from_slice(extents);
        Ok(Grid { dim, spacing, origin: o, extents: e })
    }

    /// Smallest grid whose vertices sit on integer multiples of `spacing`,
    /// covering the box `[lo, hi]` with `margin` extra cells on every side.
    pub fn covering(lo: &[f64], hi: &[f64], spacing: f64, margin: usize) -> Result<Grid> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidArgument("box corners differ in dimension".into()));
        }
        let mut origin = Vec::with_capacity(lo.len());
        let mut extents = Vec::with_capacity(lo.len());
        for (&a, &b) in lo.iter().zip(hi) {
            let first = (a / spacing + 1e-9).floor() as i64 - margin as i64;
            let last = (b / spacing - 1e-9).ceil() as i64 + margin as i64;
            origin.push(first as f64 * spacing);
            extents.push((last - first).max(1) as usize);
        }
        Grid::new(spacing, &origin, &extents)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents[..self.dim]
    }

    pub fn extent(&self, axis: usize) -> usize {
        self.extents[axis]
    }

    pub fn cell_count(&self) -> usize {
        self.extents.iter().product()
    }

    /// Lebesgue measure of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Hausdorff measure of one facet.
    pub fn facet_area(&self) -> f64 {
        self.spacing.powi(self.dim as i32 - 1)
    }

    /// Upper corner of the grid box.
    pub fn upper_corner(&self) -> Point {
        let mut p = [0.0; 3];
        for (a, c) in p.iter_mut().enumerate().take(self.dim) {
            *c = self.origin[a] + self.extents[a] as f64 * self.spacing;
        }
        p
    }

    pub fn cell_index(&self, m: [usize; 3]) -> usize {
        m[0] + self.extents[0] * (m[1] + self.extents[1] * m[2])
    }

    pub fn cell_multi(&self, idx: usize) -> [usize; 3] {
        let nx = self.extents[0];
        let ny = self.extents[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    /// Cell index for a signed multi-index, `None` outside the grid.
    pub fn cell_at(&self, m: [i64; 3]) -> Option<usize> {
        for a in 0..3 {
            if m[a] < 0 || m[a] >= self.extents[a] as i64 {
                return None;
            }
        }
        Some(self.cell_index([m[0] as usize, m[1] as usize, m[2] as usize]))
    }

    pub fn cell_center(&self, idx: usize) -> Point {
        self.center_of(self.cell_multi(idx))
    }

    pub fn center_of(&self, m: [usize; 3]) -> Point {
        let mut p = [0.0; 3];
        for (a, c) in p.iter_mut().enumerate().take(self.dim) {
            *c = self.origin[a] + (m[a] as f64 + 0.5) * self.spacing;
        }
        p
    }

    /// Signed multi-index of the cell containing `p` (may lie outside the grid).
    pub fn locate(&self, p: &Point) -> [i64; 3] {
        let mut m = [0i64; 3];
        for (a, v) in m.iter_mut().enumerate().take(self.dim) {
            *v = ((p[a] - self.origin[a]) / self.spacing).floor() as i64;
        }
        m
    }

    /// Neighbour of `idx` one step along `axis` in direction `dir` (+1 or -1).
    pub fn neighbor(&self, idx: usize, axis: usize, dir: i64) -> Option<usize> {
        let m = self.cell_multi(idx);
        let mut s = [m[0] as i64, m[1] as i64, m[2] as i64];
        s[axis] += dir;
        self.cell_at(s)
    }

    pub fn facet_extents(&self, axis: usize) -> [usize; 3] {
        let mut e = self.extents;
        e[axis] += 1;
        e
    }

    pub fn facet_count(&self, axis: usize) -> usize {
        if axis >= self.dim {
            return 0;
        }
        self.facet_extents(axis).iter().product()
    }

    pub fn total_facet_count(&self) -> usize {
        (0..self.dim).map(|a| self.facet_count(a)).sum()
    }

    /// Facet of `axis` whose base multi-index is `base`, with `base[axis]` in `0..=extent`.
    pub fn facet(&self, axis: usize, base: [usize; 3]) -> Facet {
        let e = self.facet_extents(axis);
        Facet {
            axis: axis as u8,
            index: base[0] + e[0] * (base[1] + e[1] * base[2]),
        }
    }

    pub fn facet_base(&self, f: Facet) -> [usize; 3] {
        let e = self.facet_extents(f.axis as usize);
        [f.index % e[0], (f.index / e[0]) % e[1], f.index / (e[0] * e[1])]
    }

    pub fn facet_center(&self, f: Facet) -> Point {
        let axis = f.axis as usize;
        let base = self.facet_base(f);
        let mut p = [0.0; 3];
        for (a, c) in p.iter_mut().enumerate().take(self.dim) {
            let off = if a == axis { 0.0 } else { 0.5 };
            *c = self.origin[a] + (base[a] as f64 + off) * self.spacing;
        }
        p
    }

    /// Cell on the given side of `f`, `None` when that side is outside the grid.
    pub fn facet_cell(&self, f: Facet, side: Side) -> Option<usize> {
        let axis = f.axis as usize;
        let base = self.facet_base(f);
        match side {
            Side::Upper if base[axis] < self.extents[axis] => Some(self.cell_index(base)),
            Side::Lower if base[axis] > 0 => {
                let mut m = base;
                m[axis] -= 1;
                Some(self.cell_index(m))
            }
            _ => None,
        }
    }

    /// Facet of cell `idx` normal to `axis`; `side` says which side of the facet the cell is on.
    pub fn cell_facet(&self, idx: usize, axis: usize, side: Side) -> Facet {
        let mut m = self.cell_multi(idx);
        if side == Side::Lower {
            m[axis] += 1;
        }
        self.facet(axis, m)
    }

    /// All `2n` faces of a cell, each with the side the cell occupies.
    pub fn cell_faces(&self, idx: usize) -> impl Iterator<Item = FacetSide> + '_ {
        (0..self.dim).flat_map(move |a| {
            [Side::Upper, Side::Lower]
                .into_iter()
                .map(move |s| FacetSide::new(self.cell_facet(idx, a, s), s))
        })
    }

    /// Facets of one axis in lexicographic order.
    pub fn facets(&self, axis: usize) -> impl Iterator<Item = Facet> {
        (0..self.facet_count(axis)).map(move |index| Facet { axis: axis as u8, index })
    }

    pub fn all_facets(&self) -> impl Iterator<Item = Facet> + '_ {
        (0..self.dim).flat_map(move |a| self.facets(a))
    }

    /// Position of `f` in the concatenation of all axis facet arrays.
    pub fn global_facet_id(&self, f: Facet) -> u64 {
        let offset: usize = (0..f.axis as usize).map(|a| self.facet_count(a)).sum();
        (offset + f.index) as u64
    }

    pub fn facet_from_global(&self, id: u64) -> Option<Facet> {
        let mut rest = id as usize;
        for a in 0..self.dim {
            let c = self.facet_count(a);
            if rest < c {
                return Some(Facet { axis: a as u8, index: rest });
            }
            rest -= c;
        }
        None
    }

    /// Integer cell offset of `self` inside `outer` when both share a lattice.
    pub fn offset_in(&self, outer: &Grid) -> Result<[i64; 3]> {
        if self.dim != outer.dim || ((self.spacing - outer.spacing) / outer.spacing).abs() > 1e-12 {
            return Err(Error::GridMismatch("grids differ in dimension or spacing".into()));
        }
        let mut off = [0i64; 3];
        for (a, o) in off.iter_mut().enumerate().take(self.dim) {
            let shift = (self.origin[a] - outer.origin[a]) / outer.spacing;
            let r = shift.round();
            if (shift - r).abs() > 1e-6 {
                return Err(Error::GridMismatch("grid origins are not lattice aligned".into()));
            }
            *o = r as i64;
        }
        Ok(off)
    }

    /// The facet of `target` at the same position, given `self`'s cell offset inside it.
    pub fn translate_facet(&self, f: Facet, target: &Grid, off: [i64; 3]) -> Option<Facet> {
        let axis = f.axis as usize;
        let base = self.facet_base(f);
        let fe = target.facet_extents(axis);
        let mut nb = [0usize; 3];
        for a in 0..3 {
            let v = base[a] as i64 + off[a];
            if v < 0 || v >= fe[a] as i64 {
                return None;
            }
            nb[a] = v as usize;
        }
        Some(target.facet(axis, nb))
    }

    /// Offsets of all cells whose centers lie within `radius` of a cell center.
    pub fn ball_offsets(&self, radius: f64) -> Vec<[i64; 3]> {
        let reach = (radius / self.spacing).floor() as i64;
        let r2 = (radius / self.spacing).powi(2);
        let span = |a: usize| if a < self.dim { -reach..=reach } else { 0..=0 };
        let mut out = Vec::new();
        for k in span(2) {
            for j in span(1) {
                for i in span(0) {
                    if ((i * i + j * j + k * k) as f64) <= r2 + 1e-9 {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        out
    }
}

pub(crate) fn dist2(a: &Point, b: &Point) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> Grid {
        Grid::new(0.25, &[0.0, 0.0], &[4, 3]).unwrap()
    }

    #[test]
    fn cell_index_roundtrip() {
        let g = Grid::new(0.5, &[0.0, 0.0, 0.0], &[3, 4, 5]).unwrap();
        for i in 0..g.cell_count() {
            assert_eq!(g.cell_index(g.cell_multi(i)), i);
        }
    }

    #[test]
    fn facet_sides_point_at_neighbours() {
        let g = g2();
        let f = g.facet(0, [2, 1, 0]);
        assert_eq!(g.facet_cell(f, Side::Upper), Some(g.cell_index([2, 1, 0])));
        assert_eq!(g.facet_cell(f, Side::Lower), Some(g.cell_index([1, 1, 0])));
        let edge = g.facet(1, [0, 3, 0]);
        assert_eq!(g.facet_cell(edge, Side::Upper), None);
        assert_eq!(g.facet_center(edge), [0.125, 0.75, 0.0]);
    }

    #[test]
    fn global_ids_cover_all_facets() {
        let g = g2();
        let ids: Vec<u64> = g.all_facets().map(|f| g.global_facet_id(f)).collect();
        assert_eq!(ids.len(), 5 * 3 + 4 * 4);
        for (k, id) in ids.iter().enumerate() {
            assert_eq!(*id, k as u64);
            assert_eq!(g.global_facet_id(g.facet_from_global(*id).unwrap()), *id);
        }
    }

    #[test]
    fn covering_aligns_to_lattice() {
        let g = Grid::covering(&[-1.0, -1.0], &[1.0, 1.0], 0.25, 1).unwrap();
        assert_eq!(g.extents(), &[10, 10]);
        assert_eq!(g.origin(), &[-1.25, -1.25]);
    }

    #[test]
    fn json_roundtrip() {
        let g = g2();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"extents\":[4,3]"));
        let back: Grid = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn ball_offsets_are_symmetric() {
        let g = g2();
        let offs = g.ball_offsets(2.0 * g.spacing());
        assert_eq!(offs.len(), 13);
    }
}
