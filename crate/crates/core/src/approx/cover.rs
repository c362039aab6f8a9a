//! Ball covers of the boundary used to carve approximating sets.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::domain::{dist2, Facet, Grid, Point, RoughSet};
use crate::measure::ball_count;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BallKind {
    /// Centered at a density-zero cell, with set density below one half.
    ExteriorHalfDensity,
    /// Part of the greedy cover of the reduced boundary and the cracks.
    StarCover,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverBall {
    pub center: Point,
    pub radius: f64,
    pub kind: BallKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallCover {
    pub balls: Vec<CoverBall>,
    /// Sphere measure summed over the density balls.
    pub exterior_total: f64,
    /// Sphere measure summed over the star cover balls.
    pub star_total: f64,
    /// `star_total` over the measure of the covered boundary.
    pub kappa: f64,
    /// Indices of the pairwise disjoint density balls picked by the Vitali pass.
    pub vitali_selected: Vec<usize>,
    /// Density-zero cells where no admissible radius existed; covered as boundary instead.
    pub fallback_cells: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoverAudit {
    pub density_ok: bool,
    pub coverage_ok: bool,
    pub vitali_ok: bool,
    pub containment_ok: bool,
}

impl CoverAudit {
    pub fn passed(&self) -> bool {
        self.density_ok && self.coverage_ok && self.vitali_ok && self.containment_ok
    }
}

/// Measure of the sphere of radius `r` in dimension `dim`.
pub fn sphere_measure(dim: usize, r: f64) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI * r,
        _ => 4.0 * PI * r * r,
    }
}

/// What to cover: the set whose density is tested, how cells beyond the grid
/// count, the density-zero cells, and the boundary facets.
pub(crate) struct CoverInput<'a> {
    pub work: &'a RoughSet,
    pub outside: bool,
    pub zero_cells: Vec<usize>,
    pub facets: Vec<Facet>,
    pub boundary_measure: f64,
}

struct Buckets {
    size: f64,
    dim: usize,
    map: HashMap<[i64; 3], Vec<usize>>,
}

impl Buckets {
    fn key(&self, x: &Point) -> [i64; 3] {
        let mut k = [0; 3];
        for a in 0..self.dim {
            k[a] = (x[a] / self.size).floor() as i64;
        }
        k
    }

    fn insert(&mut self, x: &Point, i: usize) {
        let k = self.key(x);
        self.map.entry(k).or_default().push(i);
    }

    fn near<'a>(&'a self, x: &Point) -> impl Iterator<Item = usize> + 'a {
        let k = self.key(x);
        let dim = self.dim;
        let span = move |a: usize| if a < dim { -1..=1 } else { 0..=0 };
        span(2)
            .flat_map(move |dk| span(1).flat_map(move |dj| span(0).map(move |di| [k[0] + di, k[1] + dj, k[2] + dk])))
            .flat_map(move |key| self.map.get(&key).into_iter().flatten().copied())
    }
}

fn half_density_radius(input: &CoverInput, x: &Point, delta: f64) -> Option<f64> {
    let h = input.work.grid().spacing();
    let mut r = delta / 2.0;
    while r >= 4.0 * h * (1.0 - 1e-12) {
        let (i, t) = ball_count(input.work, x, r, Some(input.outside)).expect("outside given");
        if (i as f64) < 0.5 * t as f64 {
            return Some(r);
        }
        r /= 2.0;
    }
    None
}

/// Builds the cover at scale `delta`: density balls around the density-zero
/// cells, then balls of radius `delta / 2` greedily placed on the boundary
/// facets in lexicographic order until every facet lies in a ball with two
/// cells to spare.
pub(crate) fn build_cover(input: &CoverInput, delta: f64) -> BallCover {
    let g = input.work.grid();
    let h = g.spacing();
    let mut balls = Vec::new();
    let mut fallback = Vec::new();
    for &c in &input.zero_cells {
        let x = g.cell_center(c);
        match half_density_radius(input, &x, delta) {
            Some(radius) => balls.push(CoverBall { center: x, radius, kind: BallKind::ExteriorHalfDensity }),
            None => fallback.push(x),
        }
    }
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| balls[b].radius.total_cmp(&balls[a].radius).then(a.cmp(&b)));
    let mut vitali_selected: Vec<usize> = Vec::new();
    for i in order {
        let b = &balls[i];
        let disjoint = vitali_selected.iter().all(|&j| {
            let s = &balls[j];
            dist2(&s.center, &b.center).sqrt() > s.radius + b.radius
        });
        if disjoint {
            vitali_selected.push(i);
        }
    }
    vitali_selected.sort_unstable();

    let r = delta / 2.0;
    let slack = r - 2.0 * h;
    let mut buckets = Buckets { size: r, dim: g.dim(), map: HashMap::new() };
    let targets = input.facets.iter().map(|&f| g.facet_center(f)).chain(fallback.iter().copied());
    for x in targets {
        let covered = buckets.near(&x).any(|i| dist2(&balls[i].center, &x) <= slack * slack);
        if !covered {
            buckets.insert(&x, balls.len());
            balls.push(CoverBall { center: x, radius: r, kind: BallKind::StarCover });
        }
    }
    let total = |kind| balls.iter().filter(|b| b.kind == kind).map(|b| sphere_measure(g.dim(), b.radius)).sum::<f64>();
    let star_total = total(BallKind::StarCover);
    BallCover {
        exterior_total: total(BallKind::ExteriorHalfDensity),
        star_total,
        kappa: if input.boundary_measure > 0.0 { star_total / input.boundary_measure } else { 0.0 },
        vitali_selected,
        fallback_cells: fallback.len(),
        balls,
    }
}

fn box_distance2(g: &Grid, cell: usize, x: &Point) -> f64 {
    let c = g.cell_center(cell);
    let half = 0.5 * g.spacing();
    (0..g.dim()).map(|a| ((x[a] - c[a]).abs() - half).max(0.0).powi(2)).sum()
}

/// Cells whose closed box meets some ball of the cover.
pub(crate) fn covered_cells(g: &Grid, cover: &BallCover) -> Vec<bool> {
    let mut hit = vec![false; g.cell_count()];
    for b in &cover.balls {
        let m = g.locate(&b.center);
        let reach = (b.radius / g.spacing()).ceil() as i64 + 1;
        let span = |a: usize| if a < g.dim() { -reach..=reach } else { 0..=0 };
        for dk in span(2) {
            for dj in span(1) {
                for di in span(0) {
                    let Some(c) = g.cell_at([m[0] + di, m[1] + dj, m[2] + dk]) else { continue };
                    if !hit[c] && box_distance2(g, c, &b.center) <= b.radius * b.radius {
                        hit[c] = true;
                    }
                }
            }
        }
    }
    hit
}

/// Re-checks the cover from scratch: density of every density ball, that
/// every boundary facet lies wholly in a star ball, that the Vitali balls are
/// disjoint and their fivefold enlargements swallow the rest, and that the
/// kept cells stay a full cell away from the complement and the cracks.
pub(crate) fn audit_cover(input: &CoverInput, cover: &BallCover, kept: &[bool], delta: f64) -> CoverAudit {
    let g = input.work.grid();
    let h = g.spacing();
    let density_ok = cover.balls.iter().filter(|b| b.kind == BallKind::ExteriorHalfDensity).all(|b| {
        let (i, t) = ball_count(input.work, &b.center, b.radius, Some(input.outside)).expect("outside given");
        (i as f64) < 0.5 * t as f64 && b.radius < delta
    });
    let stars: Vec<&CoverBall> = cover.balls.iter().filter(|b| b.kind == BallKind::StarCover).collect();
    let mut buckets = Buckets { size: stars.first().map_or(1.0, |b| b.radius), dim: g.dim(), map: HashMap::new() };
    for (i, b) in stars.iter().enumerate() {
        buckets.insert(&b.center, i);
    }
    let coverage_ok = input.facets.iter().all(|&f| {
        let x = g.facet_center(f);
        buckets.near(&x).any(|i| {
            let b = stars[i];
            let far: f64 = (0..g.dim())
                .map(|a| {
                    let d = (x[a] - b.center[a]).abs() + if a == f.axis as usize { 0.0 } else { 0.5 * h };
                    d * d
                })
                .sum();
            far <= b.radius * b.radius
        })
    });
    let dens: Vec<&CoverBall> = cover.balls.iter().filter(|b| b.kind == BallKind::ExteriorHalfDensity).collect();
    let selected: Vec<&CoverBall> = cover.vitali_selected.iter().map(|&i| &cover.balls[i]).collect();
    let disjoint = selected.iter().enumerate().all(|(i, a)| {
        selected[i + 1..].iter().all(|b| dist2(&a.center, &b.center).sqrt() > a.radius + b.radius)
    });
    let swallowed = dens.iter().all(|b| {
        selected.iter().any(|s| s.radius >= b.radius && dist2(&s.center, &b.center).sqrt() + b.radius <= 5.0 * s.radius)
    });
    let near = g.ball_offsets(1.8 * h);
    let containment_ok = (0..g.cell_count()).filter(|&c| kept[c]).all(|c| {
        let m = g.cell_multi(c);
        near.iter().all(|o| match g.cell_at([m[0] as i64 + o[0], m[1] as i64 + o[1], m[2] as i64 + o[2]]) {
            Some(n) => input.work.contains(n) && g.cell_faces(n).all(|fs| !input.work.is_crack(fs.facet)),
            None => input.outside,
        })
    });
    CoverAudit { density_ok, coverage_ok, vitali_ok: disjoint && swallowed, containment_ok }
}
