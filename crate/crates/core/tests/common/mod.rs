//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use mapalign::geometry::{Point2, Rect, Trait};
use rand::Rng;

/// Random lines through the frame, rejected when near-parallel, when two
/// crossings nearly coincide, when a crossing sits next to the frame, or when
/// no two lines cross inside the frame.
pub fn random_lines(rng: &mut impl Rng, frame: Rect, n: usize) -> Option<Vec<Trait>> {
    let pick = |rng: &mut dyn rand::RngCore| {
        Point2::new(
            rng.gen_range(frame.min.x..frame.max.x),
            rng.gen_range(frame.min.y..frame.max.y),
        )
    };
    let mut lines = Vec::new();
    for _ in 0..n {
        let (a, b) = (pick(rng), pick(rng));
        let l = mapalign::geometry::Line::through(a, b)?;
        lines.push(l);
    }
    let mut crossings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (lines[i], lines[j]);
            let d = (a.theta() - b.theta()).rem_euclid(std::f64::consts::PI);
            if !(0.05..=std::f64::consts::PI - 0.05).contains(&d) {
                return None;
            }
            let (na, nb) = (a.normal(), b.normal());
            let det = na.x * nb.y - na.y * nb.x;
            let p = Point2::new(
                (a.rho() * nb.y - b.rho() * na.y) / det,
                (na.x * b.rho() - nb.x * a.rho()) / det,
            );
            if frame.contains(p, 2.0) {
                if !frame.expanded(-2.0).contains(p, 0.0) {
                    return None;
                }
                crossings.push(p);
            }
        }
    }
    if crossings.is_empty() {
        return None;
    }
    for i in 0..crossings.len() {
        for j in i + 1..crossings.len() {
            if crossings[i].distance(crossings[j]) < 2.0 {
                return None;
            }
        }
    }
    // frame corners away from every line
    for c in frame.corners() {
        if lines.iter().any(|l| l.signed_distance(c).abs() < 2.0) {
            return None;
        }
    }
    Some(lines.into_iter().map(Trait::Line).collect())
}

/// Point-location oracle: samples the frame on a regular lattice and groups
/// samples by which side of every line they fall on. Each group is one
/// convex face; returns its sign key and sampled area.
pub fn sampled_faces(traits: &[Trait], frame: Rect, step: f64) -> BTreeMap<Vec<bool>, f64> {
    let mut faces = BTreeMap::new();
    let nx = (frame.width() / step).round() as usize;
    let ny = (frame.height() / step).round() as usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let p = Point2::new(
                frame.min.x + (ix as f64 + 0.5) * step,
                frame.min.y + (iy as f64 + 0.5) * step,
            );
            *faces.entry(sign_key(traits, p)).or_insert(0.0) += step * step;
        }
    }
    faces
}

pub fn sign_key(traits: &[Trait], p: Point2) -> Vec<bool> {
    traits
        .iter()
        .map(|t| t.as_line().signed_distance(p) > 0.0)
        .collect()
}
