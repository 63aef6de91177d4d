//! Planar arrangement of line traits clipped to a rectangular frame, and its
//! pruning into a region segmentation.
//!
//! The prime graph holds every trait–trait and trait–frame intersection as a
//! vertex and every trait (or frame side) sub-segment between consecutive
//! vertices as an edge. Faces are traced over half-edges: leaving a vertex,
//! the walk takes the outgoing half-edge immediately clockwise from the one
//! it arrived on, which keeps the face on its left. Bounded faces come out
//! positively oriented; the single negatively oriented loop is the outer face
//! and is not stored.

mod build;
mod dump;
mod prune;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{Point2, Polygon, Rect, Trait};

pub use build::build_arrangement;
pub use dump::{ArrangementDump, EdgeRecord, FaceRecord};
pub use prune::{edge_value, prune, restrict_to_interior, PruneReport};

/// Vertices closer than this are merged, in pixels.
pub const VERTEX_MERGE_EPS: f64 = 0.5;
/// Faces smaller than this are absorbed into their largest neighbor, in px².
pub const MIN_FACE_AREA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum EdgeHost {
    /// Index into [`Arrangement::traits`].
    Trait(usize),
    /// Frame side: 0 = y min, 1 = x max, 2 = y max, 3 = x min.
    Frame(usize),
}

impl EdgeHost {
    pub fn is_frame(&self) -> bool {
        matches!(self, EdgeHost::Frame(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub host: EdgeHost,
    pub start: usize,
    pub end: usize,
}

/// Half-edge `2e` runs `start → end` of edge `e`, `2e + 1` runs back.
pub type HalfEdge = usize;

pub(crate) fn half_edge_origin(edges: &[Edge], h: HalfEdge) -> usize {
    let e = &edges[h / 2];
    if h.is_multiple_of(2) {
        e.start
    } else {
        e.end
    }
}

pub(crate) fn half_edge_target(edges: &[Edge], h: HalfEdge) -> usize {
    let e = &edges[h / 2];
    if h.is_multiple_of(2) {
        e.end
    } else {
        e.start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimeGraph {
    vertices: Vec<Point2>,
    edges: Vec<Edge>,
    /// Outgoing half-edges per vertex, sorted by direction angle.
    incidence: Vec<Vec<HalfEdge>>,
}

impl PrimeGraph {
    pub(crate) fn new(vertices: Vec<Point2>, edges: Vec<Edge>) -> Self {
        let mut incidence: Vec<Vec<HalfEdge>> = vec![Vec::new(); vertices.len()];
        for (e, edge) in edges.iter().enumerate() {
            incidence[edge.start].push(2 * e);
            incidence[edge.end].push(2 * e + 1);
        }
        for (v, out) in incidence.iter_mut().enumerate() {
            let origin = vertices[v];
            out.sort_by(|&a, &b| {
                let da = vertices[half_edge_target(&edges, a)] - origin;
                let db = vertices[half_edge_target(&edges, b)] - origin;
                da.y.atan2(da.x)
                    .total_cmp(&db.y.atan2(db.x))
                    .then(a.cmp(&b))
            });
        }
        Self {
            vertices,
            edges,
            incidence,
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn incidence(&self) -> &[Vec<HalfEdge>] {
        &self.incidence
    }

    pub fn origin(&self, h: HalfEdge) -> usize {
        half_edge_origin(&self.edges, h)
    }

    pub fn target(&self, h: HalfEdge) -> usize {
        half_edge_target(&self.edges, h)
    }

    /// Successor of `h` along the face on its left.
    pub fn next(&self, h: HalfEdge) -> HalfEdge {
        let v = self.target(h);
        let twin = h ^ 1;
        let out = &self.incidence[v];
        let pos = out
            .iter()
            .position(|&x| x == twin)
            .expect("twin leaves its origin");
        out[(pos + out.len() - 1) % out.len()]
    }

    pub fn segment(&self, e: usize) -> (Point2, Point2) {
        let edge = &self.edges[e];
        (self.vertices[edge.start], self.vertices[edge.end])
    }
}

/// A half-edge traversed as part of a face boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryStep {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    boundary: Vec<BoundaryStep>,
    vertex_loop: Vec<usize>,
    polygon: Polygon,
    area: f64,
    centroid: Point2,
}

impl Face {
    pub fn boundary(&self) -> &[BoundaryStep] {
        &self.boundary
    }

    /// Vertex indices in boundary order.
    pub fn vertex_loop(&self) -> &[usize] {
        &self.vertex_loop
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Arithmetic mean of the boundary vertex positions.
    pub fn centroid(&self) -> Point2 {
        self.centroid
    }

    pub fn distinct_vertex_count(&self) -> usize {
        self.vertex_loop.iter().collect::<BTreeSet<_>>().len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    traits: Vec<Trait>,
    frame: Rect,
    prime: PrimeGraph,
    faces: Vec<Face>,
    /// Face owning each half-edge on its left; `None` for the outer face.
    half_edge_face: Vec<Option<usize>>,
    neighborhood: BTreeSet<(usize, usize)>,
}

impl Arrangement {
    pub fn traits(&self) -> &[Trait] {
        &self.traits
    }

    pub fn frame(&self) -> Rect {
        self.frame
    }

    pub fn prime(&self) -> &PrimeGraph {
        &self.prime
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    /// Unordered pairs `(i, j)`, `i < j`, of faces sharing a boundary edge.
    pub fn neighborhood(&self) -> &BTreeSet<(usize, usize)> {
        &self.neighborhood
    }

    pub fn face_of_half_edge(&self, h: HalfEdge) -> Option<usize> {
        self.half_edge_face[h]
    }

    /// Faces on the left of the forward and backward half-edges of `e`.
    pub fn edge_faces(&self, e: usize) -> (Option<usize>, Option<usize>) {
        (self.half_edge_face[2 * e], self.half_edge_face[2 * e + 1])
    }

    pub fn total_face_area(&self) -> f64 {
        self.faces.iter().map(|f| f.area).sum()
    }

    /// Area-proportional weights summing to one over the faces.
    pub fn face_weights(&self) -> Vec<f64> {
        let total = self.total_face_area();
        self.faces.iter().map(|f| f.area / total).collect()
    }

    /// Whether any boundary edge of face `i` lies on the frame.
    pub fn face_touches_frame(&self, i: usize) -> bool {
        self.faces[i]
            .boundary
            .iter()
            .any(|s| self.prime.edges[s.edge].host.is_frame())
    }

    /// `V − E + F` counting the outer face; 2 for a connected plane graph.
    pub fn euler_characteristic(&self) -> i64 {
        self.prime.vertices.len() as i64 - self.prime.edges.len() as i64
            + self.faces.len() as i64
            + 1
    }

    /// Keeps only the faces selected by `keep`, renumbering them. The prime
    /// graph is left untouched; dropped regions simply carry no face.
    pub fn retain_faces(&self, mut keep: impl FnMut(usize, &Face) -> bool) -> Arrangement {
        let mut remap = vec![None; self.faces.len()];
        let mut faces = Vec::new();
        for (i, f) in self.faces.iter().enumerate() {
            if keep(i, f) {
                remap[i] = Some(faces.len());
                faces.push(f.clone());
            }
        }
        let half_edge_face = self
            .half_edge_face
            .iter()
            .map(|f| f.and_then(|i| remap[i]))
            .collect();
        let neighborhood = self
            .neighborhood
            .iter()
            .filter_map(|&(a, b)| Some((remap[a]?, remap[b]?)))
            .collect();
        Arrangement {
            traits: self.traits.clone(),
            frame: self.frame,
            prime: self.prime.clone(),
            faces,
            half_edge_face,
            neighborhood,
        }
    }
}

/// Polygon of face `i`.
pub fn face_polygon(arr: &Arrangement, i: usize) -> &Polygon {
    &arr.faces[i].polygon
}

/// Vertex-mean center of face `i`.
pub fn face_centroid(arr: &Arrangement, i: usize) -> Point2 {
    arr.faces[i].centroid
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArrangementError {
    #[error("need at least 2 traits crossing the frame, got {0}")]
    TooFewTraits(usize),
    #[error("frame is degenerate")]
    DegenerateFrame,
    #[error("traits enclose no region (no trait intersections inside the frame)")]
    NoBoundedFace,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("distance map does not cover the arrangement frame")]
    DistanceMapMismatch,
}
