//! Smooth compactly supported test functions with exact gradients.

use std::fmt;
use std::sync::Arc;

use crate::domain::{dist2, Point};

type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// A test function together with its gradient.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    value: ScalarFn,
    gradient: VectorFn,
    center: Point,
    support_radius: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("center", &self.center)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`, with its derivative.
fn smooth_step(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let f = |s: f64| (-1.0 / s).exp();
    let (a, b) = (f(t), f(1.0 - t));
    let (da, db) = (a / (t * t), b / ((1.0 - t) * (1.0 - t)));
    let sum = a + b;
    (a / sum, (da * b + a * db) / (sum * sum))
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        center: Point,
        support_radius: f64,
        value: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> TestFunction {
        TestFunction {
            name: name.into(),
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            center,
            support_radius,
        }
    }

    /// `exp(1 - 1/(1 - s^2))` with `s = |x - center| / radius`, peak value one.
    pub fn bump(center: Point, radius: f64) -> TestFunction {
        let value = move |x: &Point| {
            let s2 = dist2(x, &center) / (radius * radius);
            if s2 >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - s2)).exp()
            }
        };
        let gradient = move |x: &Point| {
            let s2 = dist2(x, &center) / (radius * radius);
            if s2 >= 1.0 {
                return [0.0; 3];
            }
            let v = (1.0 - 1.0 / (1.0 - s2)).exp();
            let k = -2.0 * v / ((1.0 - s2).powi(2) * radius * radius);
            [k * (x[0] - center[0]), k * (x[1] - center[1]), k * (x[2] - center[2])]
        };
        TestFunction::new(format!("bump r={radius}"), center, radius, value, gradient)
    }

    /// Equal to one on `B(center, inner)`, zero outside `B(center, outer)`.
    pub fn plateau(center: Point, inner: f64, outer: f64) -> TestFunction {
        let width = outer - inner;
        let value = move |x: &Point| smooth_step((outer - dist2(x, &center).sqrt()) / width).0;
        let gradient = move |x: &Point| {
            let r = dist2(x, &center).sqrt();
            let (_, d) = smooth_step((outer - r) / width);
            if d == 0.0 || r == 0.0 {
                return [0.0; 3];
            }
            let k = -d / (width * r);
            [k * (x[0] - center[0]), k * (x[1] - center[1]), k * (x[2] - center[2])]
        };
        TestFunction::new(format!("plateau {inner}..{outer}"), center, outer, value, gradient)
    }

    /// `x^a y^b z^c` times `cutoff`.
    pub fn monomial(exponents: [u32; 3], cutoff: &TestFunction) -> TestFunction {
        let pow = |x: f64, k: u32| if k == 0 { 1.0 } else { x.powi(k as i32) };
        let dpow = |x: f64, k: u32| if k == 0 { 0.0 } else { k as f64 * x.powi(k as i32 - 1) };
        let mono = TestFunction::new(
            "",
            cutoff.center,
            f64::INFINITY,
            move |x| pow(x[0], exponents[0]) * pow(x[1], exponents[1]) * pow(x[2], exponents[2]),
            move |x| {
                let p = [pow(x[0], exponents[0]), pow(x[1], exponents[1]), pow(x[2], exponents[2])];
                [
                    dpow(x[0], exponents[0]) * p[1] * p[2],
                    p[0] * dpow(x[1], exponents[1]) * p[2],
                    p[0] * p[1] * dpow(x[2], exponents[2]),
                ]
            },
        );
        let mut out = mono.times(cutoff);
        out.name = format!("x^{exponents:?} * {}", cutoff.name);
        out
    }

    /// Pointwise product; the support is that of the factor with the smaller support.
    pub fn times(&self, other: &TestFunction) -> TestFunction {
        let (a, b) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        let (center, support_radius) = if self.support_radius <= other.support_radius {
            (self.center, self.support_radius)
        } else {
            (other.center, other.support_radius)
        };
        TestFunction::new(
            format!("{} * {}", self.name, other.name),
            center,
            support_radius,
            move |x| a.value(x) * b.value(x),
            move |x| {
                let (va, vb) = (a2.value(x), b2.value(x));
                let (ga, gb) = (a2.gradient(x), b2.gradient(x));
                [ga[0] * vb + va * gb[0], ga[1] * vb + va * gb[1], ga[2] * vb + va * gb[2]]
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, x: &Point) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &Point) -> Point {
        (self.gradient)(x)
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Largest sup of `|phi|` over the sample points.
    pub fn sup_on(&self, points: impl IntoIterator<Item = Point>) -> f64 {
        points.into_iter().map(|p| self.value(&p).abs()).fold(0.0, f64::max)
    }

    /// Worst relative mismatch between the stated gradient and a fourth-order
    /// central difference of step `h`, over `points` and the first `dim` axes.
    pub fn gradient_audit(&self, points: &[Point], h: f64, dim: usize) -> f64 {
        let mut worst = 0.0f64;
        for p in points {
            let g = self.gradient(p);
            for a in 0..dim {
                let at = |k: f64| {
                    let mut q = *p;
                    q[a] += k * h;
                    self.value(&q)
                };
                let fd = (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h);
                worst = worst.max((fd - g[a]).abs() / (1.0 + g[a].abs()));
            }
        }
        worst
    }
}

/// A vector-valued test field with its divergence.
#[derive(Clone)]
pub struct VectorTestField {
    pub name: String,
    value: VectorFn,
    divergence: ScalarFn,
}

impl fmt::Debug for VectorTestField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorTestField").field("name", &self.name).finish()
    }
}

impl VectorTestField {
    /// `psi * e_axis`.
    pub fn along(psi: &TestFunction, axis: usize) -> VectorTestField {
        let (p, q) = (psi.clone(), psi.clone());
        VectorTestField {
            name: format!("{} e{axis}", psi.name),
            value: Arc::new(move |x| {
                let mut v = [0.0; 3];
                v[axis] = p.value(x);
                v
            }),
            divergence: Arc::new(move |x| q.gradient(x)[axis]),
        }
    }

    pub fn value(&self, x: &Point) -> Point {
        (self.value)(x)
    }

    pub fn divergence(&self, x: &Point) -> f64 {
        (self.divergence)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_points() -> Vec<Point> {
        let mut pts = Vec::new();
        for i in -6..=6 {
            for j in -6..=6 {
                pts.push([0.37 * i as f64, 0.41 * j as f64, 0.0]);
            }
        }
        pts
    }

    #[test]
    fn gradients_match_differences() {
        let cut = TestFunction::plateau([0.0; 3], 2.0, 3.0);
        let h = 1.0 / 512.0;
        for phi in [
            TestFunction::bump([0.2, -0.1, 0.0], 1.3),
            cut.clone(),
            TestFunction::monomial([1, 0, 0], &cut),
            TestFunction::monomial([0, 2, 0], &cut),
            TestFunction::monomial([1, 1, 0], &cut),
        ] {
            let err = phi.gradient_audit(&sample_points(), h, 2);
            assert!(err <= 1e-6, "{}: {err}", phi.name());
        }
    }

    #[test]
    fn plateau_levels() {
        let c = TestFunction::plateau([0.0; 3], 2.0, 3.0);
        assert_eq!(c.value(&[1.9, 0.0, 0.0]), 1.0);
        assert_eq!(c.value(&[3.1, 0.0, 0.0]), 0.0);
        let mid = c.value(&[2.5, 0.0, 0.0]);
        assert!((mid - 0.5).abs() < 1e-12);
    }
}
