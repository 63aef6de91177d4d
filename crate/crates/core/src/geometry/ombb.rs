use super::{GeometryError, Point2, Polygon};

/// Convex hull by Andrew's monotone chain, positively oriented, without
/// collinear points.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Oriented minimum-area bounding rectangle of a point set.
///
/// The hull is swept with rotating calipers; the rectangle is returned
/// positively oriented and starting from its lexicographically smallest corner
/// (x first, then y), which makes cyclic shifts of the corners reproducible.
pub fn ombb(points: &[Point2]) -> Result<Polygon, GeometryError> {
    let hull = convex_hull(points);
    let scale = hull
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(1.0f64, f64::max);
    if hull.len() < 3 || super::polygon::signed_area(&hull) <= 1e-12 * scale * scale {
        return Err(GeometryError::Collinear);
    }
    let n = hull.len();
    let at = |i: usize| hull[i % n];

    // indices of the hull vertices extreme along the current edge direction
    // (max), along the inward normal (max), and opposite (min)
    let mut i_max_dir = 0usize;
    let mut i_max_norm = 0usize;
    let mut i_min_dir = 0usize;
    let mut best: Option<(f64, [Point2; 4])> = None;

    for e in 0..n {
        let p0 = at(e);
        let d = at(e + 1) - p0;
        let len = d.norm();
        let u = d * (1.0 / len);
        let v = Point2::new(-u.y, u.x);
        if e == 0 {
            i_max_dir = argmax(&hull, |p| u.dot(p));
            i_max_norm = argmax(&hull, |p| v.dot(p));
            i_min_dir = argmax(&hull, |p| -u.dot(p));
        } else {
            while u.dot(at(i_max_dir + 1)) > u.dot(at(i_max_dir)) {
                i_max_dir = (i_max_dir + 1) % n;
            }
            while v.dot(at(i_max_norm + 1)) > v.dot(at(i_max_norm)) {
                i_max_norm = (i_max_norm + 1) % n;
            }
            while u.dot(at(i_min_dir + 1)) < u.dot(at(i_min_dir)) {
                i_min_dir = (i_min_dir + 1) % n;
            }
        }
        let base_u = u.dot(p0);
        let base_v = v.dot(p0);
        let hi_u = u.dot(at(i_max_dir)) - base_u;
        let lo_u = u.dot(at(i_min_dir)) - base_u;
        let hi_v = v.dot(at(i_max_norm)) - base_v;
        let area = (hi_u - lo_u) * hi_v;
        if best.as_ref().is_none_or(|(a, _)| area < *a) {
            let corner = |s: f64, t: f64| p0 + u * s + v * t;
            best = Some((
                area,
                [
                    corner(lo_u, 0.0),
                    corner(hi_u, 0.0),
                    corner(hi_u, hi_v),
                    corner(lo_u, hi_v),
                ],
            ));
        }
    }
    let (_, corners) = best.expect("hull has at least three edges");
    Ok(canonical_rectangle(corners, scale))
}

fn argmax(points: &[Point2], f: impl Fn(Point2) -> f64) -> usize {
    let mut best = 0;
    for (i, &p) in points.iter().enumerate() {
        if f(p) > f(points[best]) {
            best = i;
        }
    }
    best
}

fn canonical_rectangle(corners: [Point2; 4], scale: f64) -> Polygon {
    let tol = 1e-9 * scale;
    let start = (1..4).fold(0, |best, i| {
        if corners[i].lex_less(corners[best], tol) {
            i
        } else {
            best
        }
    });
    let verts: Vec<Point2> = (0..4).map(|k| corners[(start + k) % 4]).collect();
    Polygon::new(verts).expect("rectangle with positive area")
}

/// Area of the rectangle enclosing `points` whose sides are parallel and
/// perpendicular to `dir`.
pub fn aligned_bounding_area(points: &[Point2], dir: Point2) -> f64 {
    let u = dir * (1.0 / dir.norm());
    let v = Point2::new(-u.y, u.x);
    let (mut lu, mut hu, mut lv, mut hv) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &p in points {
        lu = lu.min(u.dot(p));
        hu = hu.max(u.dot(p));
        lv = lv.min(v.dot(p));
        hv = hv.max(v.dot(p));
    }
    (hu - lu) * (hv - lv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Transform2;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let h = convex_hull(&pts(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (2.0, 2.0),
            (1.0, 1.0),
            (0.0, 2.0),
        ]));
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn axis_aligned_rectangle_is_itself() {
        let r = ombb(&pts(&[(1.0, 2.0), (5.0, 2.0), (5.0, 4.0), (1.0, 4.0)])).unwrap();
        let expect = pts(&[(1.0, 2.0), (5.0, 2.0), (5.0, 4.0), (1.0, 4.0)]);
        for (a, b) in r.vertices().iter().zip(&expect) {
            assert!(a.distance(*b) < 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn rotated_square_is_recovered() {
        let t = Transform2::similarity(1.0, 30f64.to_radians(), Point2::new(3.0, -1.0));
        let sq: Vec<Point2> = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
            .into_iter()
            .map(|p| t.apply(p))
            .collect();
        let r = ombb(&sq).unwrap();
        assert!((r.area() - 1.0).abs() < 1e-9);
        for c in r.vertices() {
            assert!(sq.iter().any(|p| p.distance(*c) < 1e-9));
        }
    }

    #[test]
    fn collinear_input_fails() {
        assert!(matches!(
            ombb(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])),
            Err(GeometryError::Collinear)
        ));
    }

    #[test]
    fn canonical_start_is_lexicographic_minimum() {
        let t = Transform2::similarity(2.0, 0.4, Point2::new(10.0, 5.0));
        let raw: Vec<Point2> = pts(&[(0.0, 0.0), (3.0, 0.0), (3.0, 1.0), (0.0, 1.0), (1.0, 0.5)])
            .into_iter()
            .map(|p| t.apply(p))
            .collect();
        let r = ombb(&raw).unwrap();
        let first = r.vertices()[0];
        assert!(r.vertices()[1..].iter().all(|p| first.x <= p.x + 1e-9));
    }
}
