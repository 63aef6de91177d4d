use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::descriptor::{match_descriptors, shape_descriptor_with, ShapeDescriptor};
use crate::arrangement::Arrangement;
use crate::geometry::{
    decompose_scales, estimate_affine, estimate_similarity, ombb, Point2, ScaleDecomposition,
    Transform2,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HypothesisKind {
    Exact,
    Ombb,
}

/// Candidate transform taking map 1 coordinates into map 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub transform: Transform2,
    pub source_face: usize,
    pub target_face: usize,
    /// Corner `(k + shift) mod n` of the source face maps to corner `k` of
    /// the target face.
    pub shift: usize,
    pub kind: HypothesisKind,
    pub scales: ScaleDecomposition,
    pub score: Option<f64>,
}

impl Hypothesis {
    fn new(
        transform: Transform2,
        source_face: usize,
        target_face: usize,
        shift: usize,
        kind: HypothesisKind,
    ) -> Self {
        Self {
            scales: decompose_scales(&transform),
            transform,
            source_face,
            target_face,
            shift,
            kind,
            score: None,
        }
    }

    pub fn key(&self) -> (usize, usize, usize) {
        (self.source_face, self.target_face, self.shift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchTolerances {
    /// Radians; infinite disables the corner-angle feature.
    pub angle: f64,
    /// Infinite disables the edge-length-ratio feature.
    pub ratio: f64,
    /// Radians; interior angles this close to π are not corners.
    pub corner: f64,
}

impl Default for MatchTolerances {
    fn default() -> Self {
        Self {
            angle: 10f64.to_radians(),
            ratio: 0.1,
            corner: super::CORNER_EPS,
        }
    }
}

fn shifted(corners: &[Point2], s: usize) -> Vec<Point2> {
    let n = corners.len();
    (0..n).map(|k| corners[(k + s) % n]).collect()
}

/// Face matching by shape descriptor: one similarity per matching face pair
/// and cyclic shift, estimated from the corner correspondences. Faces without
/// a valid descriptor are skipped. Sorted by (source, target, shift).
pub fn generate_hypotheses_exact(
    a1: &Arrangement,
    a2: &Arrangement,
    tol: &MatchTolerances,
) -> Vec<Hypothesis> {
    let describe = |arr: &Arrangement| -> Vec<Option<ShapeDescriptor>> {
        arr.faces()
            .iter()
            .enumerate()
            .map(
                |(i, f)| match shape_descriptor_with(f.polygon(), tol.corner) {
                    Ok(d) => Some(d),
                    Err(e) => {
                        log::warn!("face {i}: {e}; skipped");
                        None
                    }
                },
            )
            .collect()
    };
    let (d1, d2) = (describe(a1), describe(a2));
    (0..d1.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let d2 = &d2;
            let d1 = &d1;
            (0..d2.len()).flat_map(move |j| {
                let (Some(a), Some(b)) = (&d1[i], &d2[j]) else {
                    return Vec::new();
                };
                match_descriptors(a, b, tol.angle, tol.ratio)
                    .into_iter()
                    .filter_map(|s| {
                        let t = estimate_similarity(&shifted(a.corners(), s), b.corners()).ok()?;
                        Some(Hypothesis::new(t, i, j, s, HypothesisKind::Exact))
                    })
                    .collect()
            })
        })
        .collect()
}

/// Face pairing without shape matching: every face is replaced by its
/// oriented minimum bounding box and an affine transform is estimated for
/// each face pair and each of the four corner shifts. Faces whose box is
/// degenerate are skipped. Sorted by (source, target, shift).
pub fn generate_hypotheses_ombb(a1: &Arrangement, a2: &Arrangement) -> Vec<Hypothesis> {
    let boxes = |arr: &Arrangement| -> Vec<Option<Vec<Point2>>> {
        arr.faces()
            .iter()
            .enumerate()
            .map(|(i, f)| match ombb(f.polygon().vertices()) {
                Ok(b) => Some(b.vertices().to_vec()),
                Err(e) => {
                    log::warn!("face {i}: degenerate bounding box ({e}); skipped");
                    None
                }
            })
            .collect()
    };
    let (b1, b2) = (boxes(a1), boxes(a2));
    (0..b1.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (b1, b2) = (&b1, &b2);
            (0..b2.len()).flat_map(move |j| {
                let (Some(src), Some(dst)) = (&b1[i], &b2[j]) else {
                    return Vec::new();
                };
                (0..4)
                    .filter_map(|s| {
                        let t = estimate_affine(&shifted(src, s), dst).ok()?;
                        Some(Hypothesis::new(t, i, j, s, HypothesisKind::Ombb))
                    })
                    .collect()
            })
        })
        .collect()
}

/// Whether a hypothesis is close enough to a similarity: scale ratio strictly
/// inside `(1/thr_s, thr_s)` and no reflection.
pub fn is_plausible(h: &Hypothesis, thr_s: f64) -> bool {
    let r = h.scales.ratio();
    !h.scales.reflection && r > 1.0 / thr_s && r < thr_s
}

/// Keeps the plausible hypotheses, in order.
pub fn reject_false_positives(hyps: &[Hypothesis], thr_s: f64) -> Vec<Hypothesis> {
    hyps.iter()
        .filter(|h| is_plausible(h, thr_s))
        .cloned()
        .collect()
}
