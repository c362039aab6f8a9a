//! JSON domain descriptions: a constructive shape tree plus crack geometry.
//!
//! ```json
//! {"shape": {"op": "diff", "args": [{"op": "box", "min": [-1, -1], "max": [1, 1]},
//!                                   {"op": "disk", "center": [0, 0], "r": 0.5}]},
//!  "cracks": [{"seg": [[-1, 0], [-0.5, 0]]}]}
//! ```
//!
//! Alternatively `{"preset": "slit-square"}`; `cantor-cross` also reads `"k"`.

use serde::Deserialize;

use super::grid::Point;
use super::presets::Preset;
use crate::error::{Error, Result};

/// Constructive solid geometry over disks/balls, boxes and polygons.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Ball { center: Point, radius: f64 },
    Box { min: Point, max: Point },
    Polygon { points: Vec<[f64; 2]> },
    Union(Vec<Shape>),
    Inter(Vec<Shape>),
    /// First shape minus all others.
    Diff(Vec<Shape>),
}

/// A crack: a segment in 2D or an axis-aligned rectangle in 3D.
#[derive(Clone, Debug, PartialEq)]
pub enum Crack {
    Segment { from: [f64; 2], to: [f64; 2] },
    Rect { corner: Point, opposite: Point },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub dim: usize,
    pub shape: Shape,
    pub cracks: Vec<Crack>,
    /// Name of the preset this spec was expanded from, if any.
    pub preset: Option<Preset>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    shape: Option<RawShape>,
    #[serde(default)]
    cracks: Vec<RawCrack>,
    preset: Option<String>,
    k: Option<u32>,
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum RawShape {
    #[serde(alias = "ball")]
    Disk {
        center: Option<Vec<f64>>,
        r: f64,
    },
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
    },
    Polygon {
        points: Vec<[f64; 2]>,
    },
    Union {
        args: Vec<RawShape>,
    },
    Inter {
        args: Vec<RawShape>,
    },
    Diff {
        args: Vec<RawShape>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCrack {
    seg: Option<[[f64; 2]; 2]>,
    rect: Option<[Vec<f64>; 2]>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidDomain(msg.into())
}

fn to_point(v: &[f64], dim: usize, what: &str) -> Result<Point> {
    if v.len() != dim {
        return Err(invalid(format!("{what} has {} coordinates, expected {dim}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(format!("{what} has a non-finite coordinate")));
    }
    let mut p = [0.0; 3];
    p[..dim].copy_from_slice(v);
    Ok(p)
}

/// Dimension implied by a shape tree, if any node pins it.
fn raw_dim(s: &RawShape) -> Option<usize> {
    match s {
        RawShape::Disk { center, .. } => center.as_ref().map(|c| c.len()),
        RawShape::Box { min, .. } => Some(min.len()),
        RawShape::Polygon { .. } => Some(2),
        RawShape::Union { args } | RawShape::Inter { args } | RawShape::Diff { args } => {
            args.iter().find_map(raw_dim)
        }
    }
}

fn convert(s: RawShape, dim: usize) -> Result<Shape> {
    Ok(match s {
        RawShape::Disk { center, r } => {
            if !(r.is_finite() && r > 0.0) {
                return Err(invalid(format!("disk radius {r} must be positive")));
            }
            let center = match center {
                Some(c) => to_point(&c, dim, "disk center")?,
                None => [0.0; 3],
            };
            Shape::Ball { center, radius: r }
        }
        RawShape::Box { min, max } => {
            let min = to_point(&min, dim, "box min")?;
            let max = to_point(&max, dim, "box max")?;
            if (0..dim).any(|a| min[a] >= max[a]) {
                return Err(invalid("box min must be below max in every coordinate"));
            }
            Shape::Box { min, max }
        }
        RawShape::Polygon { points } => {
            if dim != 2 {
                return Err(invalid("polygons exist only in 2D"));
            }
            if points.len() < 3 || points.iter().flatten().any(|x| !x.is_finite()) {
                return Err(invalid("a polygon needs at least 3 finite vertices"));
            }
            if polygon_area(&points).abs() <= f64::EPSILON {
                return Err(invalid("polygon has zero area"));
            }
            Shape::Polygon { points }
        }
        RawShape::Union { args } => Shape::Union(convert_all(args, dim, "union")?),
        RawShape::Inter { args } => Shape::Inter(convert_all(args, dim, "inter")?),
        RawShape::Diff { args } => {
            if args.len() < 2 {
                return Err(invalid("diff needs at least two arguments"));
            }
            Shape::Diff(convert_all(args, dim, "diff")?)
        }
    })
}

fn convert_all(args: Vec<RawShape>, dim: usize, op: &str) -> Result<Vec<Shape>> {
    if args.is_empty() {
        return Err(invalid(format!("{op} needs at least one argument")));
    }
    args.into_iter().map(|a| convert(a, dim)).collect()
}

fn polygon_area(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (p, q) = (points[i], points[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}

impl Shape {
    /// Point membership; boxes and balls are open, polygons use the even-odd rule.
    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Shape::Ball { center, radius } => super::grid::dist2(p, center) < radius * radius,
            Shape::Box { min, max } => (0..3).all(|a| min[a] == max[a] || (p[a] > min[a] && p[a] < max[a])),
            Shape::Polygon { points } => {
                let mut inside = false;
                let n = points.len();
                let mut j = n - 1;
                for i in 0..n {
                    let (a, b) = (points[i], points[j]);
                    if (a[1] > p[1]) != (b[1] > p[1]) {
                        let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                        if p[0] < x {
                            inside = !inside;
                        }
                    }
                    j = i;
                }
                inside
            }
            Shape::Union(v) => v.iter().any(|s| s.contains(p)),
            Shape::Inter(v) => v.iter().all(|s| s.contains(p)),
            Shape::Diff(v) => v[0].contains(p) && !v[1..].iter().any(|s| s.contains(p)),
        }
    }

    /// Axis-aligned bounding box of the shape's possible interior.
    pub fn bounds(&self) -> (Point, Point) {
        match self {
            Shape::Ball { center, radius } => {
                let mut lo = *center;
                let mut hi = *center;
                for a in 0..3 {
                    lo[a] -= radius;
                    hi[a] += radius;
                }
                (lo, hi)
            }
            Shape::Box { min, max } => (*min, *max),
            Shape::Polygon { points } => {
                let mut lo = [f64::INFINITY, f64::INFINITY, 0.0];
                let mut hi = [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0];
                for p in points {
                    for a in 0..2 {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
                (lo, hi)
            }
            Shape::Union(v) => v.iter().map(Shape::bounds).reduce(|a, b| merge(a, b, f64::min, f64::max)).unwrap(),
            Shape::Inter(v) => v.iter().map(Shape::bounds).reduce(|a, b| merge(a, b, f64::max, f64::min)).unwrap(),
            Shape::Diff(v) => v[0].bounds(),
        }
    }
}

fn merge(a: (Point, Point), b: (Point, Point), lo: fn(f64, f64) -> f64, hi: fn(f64, f64) -> f64) -> (Point, Point) {
    let mut out = a;
    for i in 0..3 {
        out.0[i] = lo(a.0[i], b.0[i]);
        out.1[i] = hi(a.1[i], b.1[i]);
    }
    out
}

impl Crack {
    /// Hausdorff measure of the crack: length in 2D, area in 3D.
    pub fn measure(&self) -> f64 {
        match self {
            Crack::Segment { from, to } => ((to[0] - from[0]).powi(2) + (to[1] - from[1]).powi(2)).sqrt(),
            Crack::Rect { corner, opposite } => (0..3)
                .map(|a| (opposite[a] - corner[a]).abs())
                .filter(|&d| d > 0.0)
                .product(),
        }
    }

    /// Axis normal to a rectangle crack.
    pub fn flat_axis(&self) -> Option<usize> {
        match self {
            Crack::Segment { .. } => None,
            Crack::Rect { corner, opposite } => (0..3).find(|&a| corner[a] == opposite[a]),
        }
    }
}

impl DomainSpec {
    pub fn new(shape: Shape, dim: usize) -> DomainSpec {
        DomainSpec { dim, shape, cracks: Vec::new(), preset: None }
    }

    pub fn with_crack(mut self, crack: Crack) -> DomainSpec {
        self.cracks.push(crack);
        self
    }

    /// Parses a JSON document. Syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<DomainSpec> {
        let raw: RawDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        match (raw.preset, raw.shape) {
            (Some(_), Some(_)) => Err(invalid("a document may give a preset or a shape, not both")),
            (None, None) => Err(invalid("a document needs a shape or a preset")),
            (Some(name), None) => {
                if !raw.cracks.is_empty() {
                    return Err(invalid("presets carry their own cracks"));
                }
                Ok(Preset::from_name(&name, raw.k)?.spec())
            }
            (None, Some(shape)) => {
                let dim = raw_dim(&shape).unwrap_or(2);
                if !(2..=3).contains(&dim) {
                    return Err(invalid(format!("dimension {dim} is not 2 or 3")));
                }
                let shape = convert(shape, dim)?;
                let cracks = raw.cracks.into_iter().map(|c| convert_crack(c, dim)).collect::<Result<_>>()?;
                Ok(DomainSpec { dim, shape, cracks, preset: None })
            }
        }
    }
}

impl Shape {
    /// The shape as a domain-document node.
    pub fn to_value(&self, dim: usize) -> serde_json::Value {
        use serde_json::json;
        let pt = |p: &Point| p[..dim].to_vec();
        match self {
            Shape::Ball { center, radius } => {
                json!({"op": if dim == 2 { "disk" } else { "ball" }, "center": pt(center), "r": radius})
            }
            Shape::Box { min, max } => json!({"op": "box", "min": pt(min), "max": pt(max)}),
            Shape::Polygon { points } => json!({"op": "polygon", "points": points}),
            Shape::Union(args) => json!({"op": "union", "args": args.iter().map(|a| a.to_value(dim)).collect::<Vec<_>>()}),
            Shape::Inter(args) => json!({"op": "inter", "args": args.iter().map(|a| a.to_value(dim)).collect::<Vec<_>>()}),
            Shape::Diff(args) => json!({"op": "diff", "args": args.iter().map(|a| a.to_value(dim)).collect::<Vec<_>>()}),
        }
    }
}

impl DomainSpec {
    /// This domain as a document that [`DomainSpec::parse`] reads back.
    pub fn to_value(&self) -> serde_json::Value {
        use serde_json::json;
        let cracks: Vec<serde_json::Value> = self
            .cracks
            .iter()
            .map(|c| match c {
                Crack::Segment { from, to } => json!({"seg": [from, to]}),
                Crack::Rect { corner, opposite } => json!({"rect": [corner.to_vec(), opposite.to_vec()]}),
            })
            .collect();
        json!({"shape": self.shape.to_value(self.dim), "cracks": cracks})
    }
}

fn convert_crack(c: RawCrack, dim: usize) -> Result<Crack> {
    match (c.seg, c.rect) {
        (Some([a, b]), None) => {
            if dim != 2 {
                return Err(invalid("segment cracks exist only in 2D"));
            }
            if a.iter().chain(&b).any(|x| !x.is_finite()) {
                return Err(invalid("crack endpoints must be finite"));
            }
            if a == b {
                return Err(invalid("crack segment has zero length"));
            }
            Ok(Crack::Segment { from: a, to: b })
        }
        (None, Some([a, b])) => {
            if dim != 3 {
                return Err(invalid("rectangle cracks exist only in 3D"));
            }
            let corner = to_point(&a, 3, "crack corner")?;
            let opposite = to_point(&b, 3, "crack corner")?;
            let flat = (0..3).filter(|&k| corner[k] == opposite[k]).count();
            if flat != 1 {
                return Err(invalid("a rectangle crack must be flat in exactly one coordinate"));
            }
            Ok(Crack::Rect { corner, opposite })
        }
        _ => Err(invalid("a crack is either {\"seg\": ...} or {\"rect\": ...}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_documents_round_trip() {
        for p in Preset::gallery(2) {
            let spec = p.spec();
            let back = DomainSpec::parse(&spec.to_value().to_string()).unwrap();
            assert_eq!((back.dim, &back.shape, &back.cracks), (spec.dim, &spec.shape, &spec.cracks), "{}", p.name());
        }
    }

    #[test]
    fn parses_disk() {
        let s = DomainSpec::parse(r#"{"shape":{"op":"disk","center":[0,0],"r":1}}"#).unwrap();
        assert_eq!(s.dim, 2);
        assert!(s.shape.contains(&[0.5, 0.5, 0.0]));
        assert!(!s.shape.contains(&[0.8, 0.8, 0.0]));
    }

    #[test]
    fn negative_radius_is_semantic_error() {
        let e = DomainSpec::parse(r#"{"shape":{"op":"disk","r":-1}}"#).unwrap_err();
        assert!(matches!(e, Error::InvalidDomain(_)));
    }

    #[test]
    fn syntax_error_has_position() {
        let e = DomainSpec::parse("{\"shape\":\n {\"op\": }").unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preset_and_shape_conflict() {
        let e = DomainSpec::parse(r#"{"preset":"slit-square","shape":{"op":"disk","r":1}}"#).unwrap_err();
        assert!(matches!(e, Error::InvalidDomain(_)));
    }

    #[test]
    fn zero_length_crack_rejected() {
        let e = DomainSpec::parse(r#"{"shape":{"op":"disk","r":1},"cracks":[{"seg":[[0,0],[0,0]]}]}"#);
        assert!(e.is_err());
    }

    #[test]
    fn polygon_even_odd() {
        let s = Shape::Polygon { points: vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]] };
        assert!(s.contains(&[1.0, 1.0, 0.0]));
        assert!(!s.contains(&[3.0, 1.0, 0.0]));
    }

    #[test]
    fn diff_bounds_follow_first_argument() {
        let s = DomainSpec::parse(
            r#"{"shape":{"op":"diff","args":[{"op":"box","min":[-1,-1],"max":[1,1]},{"op":"disk","r":0.5}]}}"#,
        )
        .unwrap();
        assert_eq!(s.shape.bounds().0[0], -1.0);
        assert!(!s.shape.contains(&[0.0, 0.0, 0.0]));
    }
}
