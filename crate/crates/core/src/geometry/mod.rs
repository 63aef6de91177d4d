//! Planar geometry kernel: points and line traits, polygon measures and
//! boolean areas, oriented minimum bounding boxes, and transform estimation.
//!
//! All predicates are tolerance based; coordinates are pixels.

mod ombb;
mod polygon;
mod primitives;
mod transform;

pub use ombb::{aligned_bounding_area, convex_hull, ombb};
pub(crate) use polygon::signed_area;
pub use polygon::{
    polygon_area, polygon_intersection_area, polygon_iou, polygon_union_area, Polygon,
};
pub use primitives::{trait_intersection, Line, Point2, Rect, Trait};
pub use transform::{
    decompose_scales, estimate_affine, estimate_similarity, rms_residual, ScaleDecomposition,
    Transform2,
};

/// Parallel-line tolerance for exactly specified traits, in radians.
pub const EXACT_PARALLEL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("points are collinear")]
    Collinear,
    #[error("correspondence lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} correspondences, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("source points are all coincident")]
    Degenerate,
    #[error("source points are rank deficient (collinear)")]
    RankDeficient,
    #[error("linear part is singular")]
    Singular,
    #[error("last matrix row must be (0, 0, 1)")]
    NotAffine,
}
