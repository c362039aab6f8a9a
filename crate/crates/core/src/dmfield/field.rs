//! Facet-valued vector fields and their binary file format.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Facet, FacetKind, FacetSide, Grid, Point, RoughSet, Side};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"DMF1";

/// Normal components of a bounded field on grid facets.
///
/// Cracks and set boundaries may carry a different value on each side; all
/// other facets hold a single value.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxField {
    grid: Grid,
    values: Vec<Vec<f64>>,
    two_sided: BTreeMap<Facet, [f64; 2]>,
    sup_bound: f64,
}

impl FluxField {
    pub fn zeros(grid: &Grid) -> FluxField {
        FluxField {
            values: (0..grid.dim()).map(|a| vec![0.0; grid.facet_count(a)]).collect(),
            grid: grid.clone(),
            two_sided: BTreeMap::new(),
            sup_bound: 0.0,
        }
    }

    /// Zero field whose crack and boundary facets of `set` are two-sided.
    pub fn zeros_for(set: &RoughSet) -> FluxField {
        let mut f = FluxField::zeros(set.grid());
        for facet in set.two_sided_facets() {
            f.two_sided.insert(facet, [0.0, 0.0]);
        }
        f
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn set_sup_bound(&mut self, bound: f64) {
        self.sup_bound = bound;
    }

    pub fn is_two_sided(&self, f: Facet) -> bool {
        self.two_sided.contains_key(&f)
    }

    pub fn two_sided(&self) -> &BTreeMap<Facet, [f64; 2]> {
        &self.two_sided
    }

    /// Value seen from `side` of the facet.
    pub fn side_value(&self, f: Facet, side: Side) -> f64 {
        match self.two_sided.get(&f) {
            Some(v) => v[side.index()],
            None => self.values[f.axis as usize][f.index],
        }
    }

    /// Single value of a one-sided facet; for two-sided facets the mean of both sides.
    pub fn value(&self, f: Facet) -> f64 {
        match self.two_sided.get(&f) {
            Some(v) => 0.5 * (v[0] + v[1]),
            None => self.values[f.axis as usize][f.index],
        }
    }

    pub fn set_value(&mut self, f: Facet, v: f64) {
        match self.two_sided.get_mut(&f) {
            Some(s) => *s = [v, v],
            None => self.values[f.axis as usize][f.index] = v,
        }
    }

    /// Sets one side, making the facet two-sided if needed.
    pub fn set_side(&mut self, f: Facet, side: Side, v: f64) {
        let current = self.values[f.axis as usize][f.index];
        let entry = self.two_sided.entry(f).or_insert([current, current]);
        entry[side.index()] = v;
        self.values[f.axis as usize][f.index] = 0.0;
    }

    /// Flux leaving the cell on `fs.side` through `fs.facet`, per unit area.
    pub fn outgoing(&self, fs: FacetSide) -> f64 {
        fs.side.outward_sign() * self.side_value(fs.facet, fs.side)
    }

    /// Sum of outgoing fluxes of a cell, per unit facet area.
    pub fn cell_balance(&self, cell: usize) -> f64 {
        self.grid.cell_faces(cell).map(|fs| self.outgoing(fs)).sum()
    }

    /// Cell-centered vector: the mean of the values on opposite faces.
    pub fn cell_vector(&self, cell: usize) -> Point {
        let mut v = [0.0; 3];
        for (a, va) in v.iter_mut().enumerate().take(self.grid.dim()) {
            let lo = self.grid.cell_facet(cell, a, Side::Upper);
            let hi = self.grid.cell_facet(cell, a, Side::Lower);
            *va = 0.5 * (self.side_value(lo, Side::Upper) + self.side_value(hi, Side::Lower));
        }
        v
    }

    pub fn max_abs(&self) -> f64 {
        let dense = self.values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        self.two_sided.values().flatten().fold(dense, |m, v| m.max(v.abs()))
    }

    /// Recomputes the bound as the largest stored magnitude.
    pub fn tighten_bound(&mut self) {
        self.sup_bound = self.max_abs();
    }

    pub fn scaled(&self, k: f64) -> FluxField {
        let mut out = self.clone();
        out.values.iter_mut().flatten().for_each(|v| *v *= k);
        out.two_sided.values_mut().flatten().for_each(|v| *v *= k);
        out.sup_bound *= k.abs();
        out
    }

    /// Sum of two fields on the same grid; two-sided facets of either stay two-sided.
    pub fn add(&self, other: &FluxField) -> Result<FluxField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("cannot add fields on different grids".into()));
        }
        let mut out = FluxField::zeros(&self.grid);
        for f in self.two_sided.keys().chain(other.two_sided.keys()) {
            out.two_sided.insert(*f, [0.0, 0.0]);
        }
        for f in self.grid.all_facets() {
            if out.is_two_sided(f) {
                for s in [Side::Lower, Side::Upper] {
                    out.set_side(f, s, self.side_value(f, s) + other.side_value(f, s));
                }
            } else {
                out.values[f.axis as usize][f.index] = self.side_value(f, Side::Lower) + other.side_value(f, Side::Lower);
            }
        }
        out.sup_bound = self.sup_bound + other.sup_bound;
        Ok(out)
    }

    /// Serializes to the `DMF1` little-endian binary layout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let g = &self.grid;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
        for &e in g.extents() {
            out.extend_from_slice(&(e as u64).to_le_bytes());
        }
        out.extend_from_slice(&g.spacing().to_le_bytes());
        for &o in g.origin() {
            out.extend_from_slice(&o.to_le_bytes());
        }
        for axis in &self.values {
            for v in axis {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out.extend_from_slice(&(2 * self.two_sided.len() as u64).to_le_bytes());
        for (f, v) in &self.two_sided {
            for side in [Side::Lower, Side::Upper] {
                out.extend_from_slice(&g.global_facet_id(*f).to_le_bytes());
                out.push(side.index() as u8);
                out.extend_from_slice(&v[side.index()].to_le_bytes());
            }
        }
        out
    }

    /// Parses a `DMF1` buffer; the bound becomes the largest stored magnitude.
    pub fn from_bytes(bytes: &[u8]) -> Result<FluxField> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Format("missing DMF1 magic".into()));
        }
        let n = u32::from_le_bytes(r.take(4)?.try_into().unwrap()) as usize;
        if !(2..=3).contains(&n) {
            return Err(Error::Format(format!("dimension {n} is not 2 or 3")));
        }
        let extents: Vec<usize> = (0..n).map(|_| r.u64().map(|e| e as usize)).collect::<Result<_>>()?;
        let spacing = r.f64()?;
        let origin: Vec<f64> = (0..n).map(|_| r.f64()).collect::<Result<_>>()?;
        let grid = Grid::new(spacing, &origin, &extents).map_err(|e| Error::Format(e.to_string()))?;
        let mut field = FluxField::zeros(&grid);
        for a in 0..n {
            for i in 0..grid.facet_count(a) {
                field.values[a][i] = r.f64()?;
            }
        }
        let count = r.u64()?;
        for _ in 0..count {
            let id = r.u64()?;
            let side = match r.take(1)?[0] {
                0 => Side::Lower,
                1 => Side::Upper,
                s => return Err(Error::Format(format!("side byte {s}"))),
            };
            let v = r.f64()?;
            let f = grid
                .facet_from_global(id)
                .ok_or_else(|| Error::Format(format!("facet id {id} out of range")))?;
            field.set_side(f, side, v);
        }
        if r.pos != bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        field.tighten_bound();
        Ok(field)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("unexpected end of file".into()))?;
        self.pos = end;
        Ok(s)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Samples the normal components of `f` on the facets of `set`.
///
/// Interior facets take the value at their center, cracks the one-sided
/// limits a quarter cell away, boundary facets the center value on the set
/// side and zero outside. Fails if `|f|` exceeds `sup_bound` at a sample.
pub fn sample_field(f: impl Fn(&Point) -> Point, set: &RoughSet, sup_bound: f64) -> Result<FluxField> {
    let g = set.grid();
    let mut out = FluxField::zeros_for(set);
    out.sup_bound = sup_bound;
    let tol = sup_bound * (1.0 + 1e-12);
    let eval = |x: &Point| -> Result<Point> {
        let v = f(x);
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm <= tol) {
            return Err(Error::UnboundedField(format!("|f| = {norm} at {x:?} exceeds bound {sup_bound}")));
        }
        Ok(v)
    };
    let quarter = 0.25 * g.spacing();
    for facet in g.all_facets() {
        let a = facet.axis as usize;
        let x = g.facet_center(facet);
        match set.facet_kind(facet) {
            FacetKind::Interior => out.set_value(facet, eval(&x)?[a]),
            FacetKind::Crack => {
                let (mut lo, mut hi) = (x, x);
                lo[a] -= quarter;
                hi[a] += quarter;
                out.set_side(facet, Side::Lower, eval(&lo)?[a]);
                out.set_side(facet, Side::Upper, eval(&hi)?[a]);
            }
            FacetKind::Boundary { inside } => out.set_side(facet, inside, eval(&x)?[a]),
            FacetKind::Exterior => {}
        }
    }
    Ok(out)
}

/// Field with independent uniform values in `[-bound, bound]` on every set facet side.
pub fn random_field(set: &RoughSet, seed: u64, bound: f64) -> FluxField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FluxField::zeros_for(set);
    out.sup_bound = bound;
    for facet in set.grid().all_facets() {
        match set.facet_kind(facet) {
            FacetKind::Interior => out.set_value(facet, rng.gen_range(-bound..=bound)),
            FacetKind::Crack => {
                out.set_side(facet, Side::Lower, rng.gen_range(-bound..=bound));
                out.set_side(facet, Side::Upper, rng.gen_range(-bound..=bound));
            }
            FacetKind::Boundary { inside } => out.set_side(facet, inside, rng.gen_range(-bound..=bound)),
            FacetKind::Exterior => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Preset;

    fn slit() -> RoughSet {
        let g = Preset::SlitSquare.grid(4).unwrap();
        Preset::SlitSquare.rasterize(&g).unwrap()
    }

    #[test]
    fn sign_field_on_slit() {
        let s = slit();
        let f = sample_field(|x| [0.0, x[1].signum(), 0.0], &s, 1.0).unwrap();
        let crack = *s.cracks().keys().next().unwrap();
        assert_eq!(f.side_value(crack, Side::Lower), -1.0);
        assert_eq!(f.side_value(crack, Side::Upper), 1.0);
    }

    #[test]
    fn linear_field_in_bounds() {
        let g = crate::domain::Grid::covering(&[-0.5, -0.5], &[0.5, 0.5], 1.0 / 16.0, 2).unwrap();
        let spec = crate::domain::DomainSpec::new(
            crate::domain::Shape::Box { min: [-0.5, -0.5, 0.0], max: [0.5, 0.5, 0.0] },
            2,
        );
        let s = crate::domain::rasterize(&spec, &g).unwrap();
        let f = sample_field(|x| [x[0], x[1], 0.0], &s, 1.0).unwrap();
        assert!(f.max_abs() <= 1.0);
        assert!(matches!(sample_field(|x| [x[0], x[1], 0.0], &s, 0.1), Err(Error::UnboundedField(_))));
    }

    #[test]
    fn binary_roundtrip() {
        let s = slit();
        let f = random_field(&s, 7, 1.0);
        let back = FluxField::from_bytes(&f.to_bytes()).unwrap();
        assert_eq!(back.to_bytes(), f.to_bytes());
        assert_eq!(back.sup_bound(), f.max_abs());
        let mut bad = f.to_bytes();
        bad.push(0);
        assert!(FluxField::from_bytes(&bad).is_err());
        assert!(FluxField::from_bytes(&bad[..20]).is_err());
    }
}
