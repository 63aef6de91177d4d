use serde::{Deserialize, Serialize};

use super::{GeometryError, Point2, Transform2};

/// Closed polygon with positively oriented (shoelace-positive) vertices.
///
/// Faces produced by the arrangement are simple, except that a pruned face may
/// retain a bridge edge which its boundary walks in both directions. Every
/// measure here is defined through the signed boundary, so such weakly simple
/// loops are handled the same way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    /// Builds a polygon, reversing clockwise input. Fails on fewer than three
    /// vertices, non-finite coordinates or zero area.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let signed = signed_area(&vertices);
        if !(signed.abs() > 0.0) {
            return Err(GeometryError::ZeroArea);
        }
        if signed < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(b)).sum()
    }

    /// Arithmetic mean of the vertex positions.
    pub fn vertex_centroid(&self) -> Point2 {
        let n = self.vertices.len() as f64;
        let sum = self
            .vertices
            .iter()
            .fold(Point2::default(), |acc, &p| acc + p);
        sum * (1.0 / n)
    }

    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Non-zero winding test. Points exactly on the boundary may fall on
    /// either side.
    pub fn contains(&self, p: Point2) -> bool {
        let mut winding = 0i32;
        for (a, b) in self.edges() {
            if a.y <= p.y {
                if b.y > p.y && (b - a).cross(p - a) > 0.0 {
                    winding += 1;
                }
            } else if b.y <= p.y && (b - a).cross(p - a) < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// Image of the polygon under `t`; orientation is restored for reflections.
    pub fn transformed(&self, t: &Transform2) -> Result<Polygon, GeometryError> {
        Polygon::new(self.vertices.iter().map(|&p| t.apply(p)).collect())
    }
}

pub(crate) fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        twice += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * twice
}

pub fn polygon_area(p: &Polygon) -> f64 {
    p.area()
}

/// Area of `a ∩ b`.
///
/// Both indicator functions are written as signed sums of fan triangles from a
/// shared apex; the intersection area is then the signed sum of pairwise
/// convex triangle overlaps. This holds for any simple or weakly simple loop.
pub fn polygon_intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    let (alo, ahi) = a.bounds();
    let (blo, bhi) = b.bounds();
    if alo.x >= bhi.x || blo.x >= ahi.x || alo.y >= bhi.y || blo.y >= ahi.y {
        return 0.0;
    }
    let apex = Point2::new(0.5 * (alo.x + ahi.x), 0.5 * (alo.y + ahi.y));
    let fan = |p: &Polygon| -> Vec<(f64, [Point2; 3])> {
        p.edges()
            .filter_map(|(u, v)| {
                let (u, v) = (u - apex, v - apex);
                let s = u.cross(v);
                if s == 0.0 {
                    None
                } else if s > 0.0 {
                    Some((1.0, [Point2::default(), u, v]))
                } else {
                    Some((-1.0, [Point2::default(), v, u]))
                }
            })
            .collect()
    };
    let fa = fan(a);
    let fb = fan(b);
    let mut total = 0.0;
    for (sa, ta) in &fa {
        let (lo_a, hi_a) = tri_bounds(ta);
        for (sb, tb) in &fb {
            let (lo_b, hi_b) = tri_bounds(tb);
            if lo_a.x >= hi_b.x || lo_b.x >= hi_a.x || lo_a.y >= hi_b.y || lo_b.y >= hi_a.y {
                continue;
            }
            let clipped = clip_convex(ta, tb);
            if clipped.len() >= 3 {
                total += sa * sb * signed_area(&clipped);
            }
        }
    }
    total.clamp(0.0, a.area().min(b.area()))
}

/// Area of `a ∪ b` by inclusion–exclusion.
pub fn polygon_union_area(a: &Polygon, b: &Polygon) -> f64 {
    a.area() + b.area() - polygon_intersection_area(a, b)
}

/// Intersection over union; 0 for disjoint inputs.
pub fn polygon_iou(a: &Polygon, b: &Polygon) -> f64 {
    let inter = polygon_intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union > 0.0 {
        (inter / union).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

fn tri_bounds(t: &[Point2; 3]) -> (Point2, Point2) {
    let lo = Point2::new(
        t[0].x.min(t[1].x).min(t[2].x),
        t[0].y.min(t[1].y).min(t[2].y),
    );
    let hi = Point2::new(
        t[0].x.max(t[1].x).max(t[2].x),
        t[0].y.max(t[1].y).max(t[2].y),
    );
    (lo, hi)
}

/// Sutherland–Hodgman clip of a positively oriented convex subject by a
/// positively oriented convex clip polygon.
fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut output: Vec<Point2> = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let c0 = clip[i];
        let c1 = clip[(i + 1) % n];
        let edge = c1 - c0;
        let input = std::mem::take(&mut output);
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let dc = edge.cross(cur - c0);
            let dp = edge.cross(prev - c0);
            if dc >= 0.0 {
                if dp < 0.0 {
                    output.push(prev + (cur - prev) * (dp / (dp - dc)));
                }
                output.push(cur);
            } else if dp >= 0.0 {
                output.push(prev + (cur - prev) * (dp / (dp - dc)));
            }
        }
    }
    output
}
