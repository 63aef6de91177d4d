//! Hypothesis evaluation with the arrangement match score and winner
//! selection.
//!
//! A hypothesis maps map 1 into map 2, so faces of the first arrangement are
//! carried forward into the frame of the second before comparison. Scores
//! rank hypotheses for one pair of maps; they are not comparable across
//! different pairs.

use std::cmp::Ordering;
use std::f64::consts::E;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::Hypothesis;
use crate::arrangement::Arrangement;
use crate::geometry::{polygon_intersection_area, Point2, Polygon, Transform2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoringError {
    #[error("hypothesis pool is empty")]
    EmptyPool,
}

/// `(e^IoU − 1) / (e − 1)`: 0 for disjoint faces, 1 for a perfect match,
/// steepest near a perfect match.
pub fn score_from_iou(iou: f64) -> f64 {
    (iou.exp_m1() / (E - 1.0)).clamp(0.0, 1.0)
}

/// Exponential IoU score of two polygons given in the same frame.
pub fn face_match_score(a: &Polygon, b: &Polygon) -> f64 {
    let inter = polygon_intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if !(union > 0.0) {
        return 0.0;
    }
    score_from_iou((inter / union).clamp(0.0, 1.0))
}

/// One-to-one face pairs `(face in map 1, face in map 2)`, sorted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Association {
    pub pairs: Vec<(usize, usize)>,
}

impl Association {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairContribution {
    pub source: usize,
    pub target: usize,
    /// `min(w(f_i), w(f_j))`.
    pub weight: f64,
    pub face_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAlignment {
    pub transform: Transform2,
    pub score: f64,
    pub association: Association,
    pub contributions: Vec<PairContribution>,
}

/// Faces of `a1` carried into the frame of `a2`.
struct Mapped {
    polygons: Vec<Option<Polygon>>,
    centers: Vec<Point2>,
}

fn map_faces(a1: &Arrangement, t: &Transform2) -> Mapped {
    Mapped {
        polygons: a1
            .faces()
            .iter()
            .map(|f| f.polygon().transformed(t).ok())
            .collect(),
        centers: a1.faces().iter().map(|f| t.apply(f.centroid())).collect(),
    }
}

fn bbox_contains(poly: &Polygon, p: Point2) -> bool {
    let (lo, hi) = poly.bounds();
    p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y
}

fn associate_mapped(a2: &Arrangement, m: &Mapped) -> Association {
    // c1: each face encloses the other's center
    let mut candidates: Vec<(usize, usize, f64)> = Vec::new();
    for (i, pi) in m.polygons.iter().enumerate() {
        let Some(pi) = pi else { continue };
        for (j, fj) in a2.faces().iter().enumerate() {
            let cj = fj.centroid();
            let (ci, pj) = (m.centers[i], fj.polygon());
            if bbox_contains(pj, ci) && bbox_contains(pi, cj) && pj.contains(ci) && pi.contains(cj)
            {
                candidates.push((i, j, (pi.area() - fj.area()).abs()));
            }
        }
    }
    // c2 and c3: keep a pair only if it has the smallest area difference
    // among the candidates of both of its faces
    let better = |a: &(usize, usize, f64), b: &(usize, usize, f64)| {
        a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)) == Ordering::Less
    };
    let mut pairs: Vec<(usize, usize)> = candidates
        .iter()
        .filter(|c| {
            !candidates
                .iter()
                .any(|o| (o.0 == c.0 || o.1 == c.1) && (o.0, o.1) != (c.0, c.1) && better(o, c))
        })
        .map(|c| (c.0, c.1))
        .collect();
    pairs.sort_unstable();
    Association { pairs }
}

/// Mutual center-enclosure pairs, made one-to-one by keeping for every face
/// only the partner with the smallest area difference (measured after
/// mapping `a1` by `t`).
pub fn associate(a1: &Arrangement, a2: &Arrangement, t: &Transform2) -> Association {
    associate_mapped(a2, &map_faces(a1, t))
}

/// Σ over associated pairs of `min(w(f_i), w(f_j)) · s_f`, with weights the
/// face areas over the total face area of their own arrangement.
pub fn arrangement_match_score(
    a1: &Arrangement,
    a2: &Arrangement,
    t: &Transform2,
) -> ScoredAlignment {
    let m = map_faces(a1, t);
    let association = associate_mapped(a2, &m);
    let (w1, w2) = (a1.face_weights(), a2.face_weights());
    let contributions: Vec<PairContribution> = association
        .pairs
        .iter()
        .map(|&(i, j)| PairContribution {
            source: i,
            target: j,
            weight: w1[i].min(w2[j]),
            face_score: face_match_score(
                m.polygons[i].as_ref().expect("associated faces map"),
                a2.face(j).polygon(),
            ),
        })
        .collect();
    let score = contributions
        .iter()
        .map(|c| c.weight * c.face_score)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    ScoredAlignment {
        transform: *t,
        score,
        association,
        contributions,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// The pool with every score filled in, in input order.
    pub pool: Vec<Hypothesis>,
    pub winner_index: usize,
    pub winner: ScoredAlignment,
    /// Every hypothesis scored zero; the winner comes from tie-breaking only.
    pub low_confidence: bool,
}

impl Selection {
    pub fn winning_hypothesis(&self) -> &Hypothesis {
        &self.pool[self.winner_index]
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Scores every hypothesis (in parallel) and picks the highest score. Ties
/// go to the larger association, then to the scale closest to the pool
/// median, then to the smallest (source, target, shift).
pub fn select_best(
    a1: &Arrangement,
    a2: &Arrangement,
    hyps: &[Hypothesis],
) -> Result<Selection, ScoringError> {
    if hyps.is_empty() {
        return Err(ScoringError::EmptyPool);
    }
    let scored: Vec<ScoredAlignment> = hyps
        .par_iter()
        .map(|h| arrangement_match_score(a1, a2, &h.transform))
        .collect();
    let med = median(hyps.iter().map(|h| h.transform.mean_scale()).collect());
    let rank = |i: usize, j: usize| -> Ordering {
        // Less means i is preferred
        scored[j]
            .score
            .total_cmp(&scored[i].score)
            .then(
                scored[j]
                    .association
                    .len()
                    .cmp(&scored[i].association.len()),
            )
            .then(
                (hyps[i].transform.mean_scale() - med)
                    .abs()
                    .total_cmp(&(hyps[j].transform.mean_scale() - med).abs()),
            )
            .then(hyps[i].key().cmp(&hyps[j].key()))
            .then(i.cmp(&j))
    };
    let winner_index = (1..hyps.len()).fold(0, |best, i| {
        if rank(i, best) == Ordering::Less {
            i
        } else {
            best
        }
    });
    let low_confidence = scored.iter().all(|s| s.score == 0.0);
    let pool = hyps
        .iter()
        .zip(&scored)
        .map(|(h, s)| Hypothesis {
            score: Some(s.score),
            ..h.clone()
        })
        .collect();
    Ok(Selection {
        pool,
        winner_index,
        winner: scored[winner_index].clone(),
        low_confidence,
    })
}
