use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::AlignmentError;
use crate::geometry::{Point2, Polygon};

/// Vertices whose interior angle is within this of π are not corners.
pub const CORNER_EPS: f64 = 5.0 * PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorEntry {
    /// Interior angle at the corner, in `(0, 2π)`.
    pub corner_angle: f64,
    /// Length of the edge leaving the corner over the perimeter.
    pub edge_length_ratio: f64,
}

/// Cyclic sequence of (corner angle, outgoing edge length ratio) along the
/// positively oriented boundary, together with the corner positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeDescriptor {
    entries: Vec<DescriptorEntry>,
    corners: Vec<Point2>,
}

impl ShapeDescriptor {
    pub fn entries(&self) -> &[DescriptorEntry] {
        &self.entries
    }

    pub fn corners(&self) -> &[Point2] {
        &self.corners
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn interior_angle(prev: Point2, v: Point2, next: Point2) -> f64 {
    let d1 = v - prev;
    let d2 = next - v;
    PI - d1.cross(d2).atan2(d1.dot(d2))
}

/// Descriptor of a polygon with the default corner tolerance.
pub fn shape_descriptor(polygon: &Polygon) -> Result<ShapeDescriptor, AlignmentError> {
    shape_descriptor_with(polygon, CORNER_EPS)
}

/// Descriptor of a polygon. Repeated vertices are dropped and vertices with
/// an interior angle within `eps_corner` of π are dissolved into their
/// surrounding edge, flattest first, until every remaining vertex is a corner.
pub fn shape_descriptor_with(
    polygon: &Polygon,
    eps_corner: f64,
) -> Result<ShapeDescriptor, AlignmentError> {
    let mut pts: Vec<Point2> = polygon.vertices().to_vec();
    let scale = pts.iter().map(|p| p.norm()).fold(1.0, f64::max);
    pts.dedup_by(|a, b| a.distance(*b) <= 1e-12 * scale);
    while pts.len() > 1 && pts[0].distance(pts[pts.len() - 1]) <= 1e-12 * scale {
        pts.pop();
    }
    loop {
        let n = pts.len();
        if n < 3 {
            return Err(AlignmentError::TooFewCorners(n));
        }
        let flattest = (0..n)
            .map(|i| {
                (
                    i,
                    (interior_angle(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]) - PI).abs(),
                )
            })
            .filter(|&(_, dev)| dev < eps_corner)
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        match flattest {
            Some((i, _)) => {
                pts.remove(i);
            }
            None => break,
        }
    }
    let n = pts.len();
    let perimeter: f64 = (0..n).map(|i| pts[i].distance(pts[(i + 1) % n])).sum();
    let entries = (0..n)
        .map(|i| DescriptorEntry {
            corner_angle: interior_angle(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]),
            edge_length_ratio: pts[i].distance(pts[(i + 1) % n]) / perimeter,
        })
        .collect();
    Ok(ShapeDescriptor {
        entries,
        corners: pts,
    })
}

/// Every cyclic shift `s` with `a[(k + s) mod n]` matching `b[k]` for all `k`:
/// angles within `tol_angle` and ratios within `tol_ratio`. An infinite
/// tolerance disables that feature. Descriptors of different sizes never
/// match.
pub fn match_descriptors(
    a: &ShapeDescriptor,
    b: &ShapeDescriptor,
    tol_angle: f64,
    tol_ratio: f64,
) -> Vec<usize> {
    let n = a.len();
    if n != b.len() || n == 0 {
        return Vec::new();
    }
    (0..n)
        .filter(|&s| {
            (0..n).all(|k| {
                let (x, y) = (a.entries[(k + s) % n], b.entries[k]);
                (x.corner_angle - y.corner_angle).abs() <= tol_angle
                    && (x.edge_length_ratio - y.edge_length_ratio).abs() <= tol_ratio
            })
        })
        .collect()
}
