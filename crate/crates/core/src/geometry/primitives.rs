use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point (or vector) in pixel units. x grows right, y grows down.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic (x, then y) comparison with a tolerance on x.
    pub(crate) fn lex_less(self, other: Point2, tol: f64) -> bool {
        if (self.x - other.x).abs() > tol {
            self.x < other.x
        } else {
            self.y < other.y
        }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// An unbounded straight line in normal form: `p · (cos θ, sin θ) = ρ`.
///
/// The normal angle is kept in `[0, π)`, which fixes the sign of `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    theta: f64,
    rho: f64,
}

impl Line {
    pub fn new(theta: f64, rho: f64) -> Self {
        let mut theta = theta.rem_euclid(2.0 * PI);
        let mut rho = rho;
        if theta >= PI {
            theta -= PI;
            rho = -rho;
        }
        // rem_euclid can land exactly on the upper bound after subtraction rounding
        if theta >= PI {
            theta = 0.0;
            rho = -rho;
        }
        Self { theta, rho }
    }

    /// Line through two distinct points. Returns `None` when they coincide.
    pub fn through(a: Point2, b: Point2) -> Option<Self> {
        let d = b - a;
        let len = d.norm();
        if !(len > 0.0) || !len.is_finite() {
            return None;
        }
        let normal = Point2::new(-d.y / len, d.x / len);
        let theta = normal.y.atan2(normal.x);
        Some(Self::new(theta, normal.dot(a)))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn normal(&self) -> Point2 {
        Point2::new(self.theta.cos(), self.theta.sin())
    }

    /// Unit direction along the line, the normal rotated by +90°.
    pub fn direction(&self) -> Point2 {
        Point2::new(-self.theta.sin(), self.theta.cos())
    }

    /// Foot of the perpendicular from the origin.
    pub fn anchor(&self) -> Point2 {
        self.normal() * self.rho
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.anchor() + self.direction() * t
    }

    /// Coordinate of the projection of `p` along [`Line::direction`].
    pub fn param(&self, p: Point2) -> f64 {
        self.direction().dot(p)
    }

    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.normal().dot(p) - self.rho
    }
}

/// A geometric primitive partitioning the plane. Only straight lines are detected
/// and arranged; the enum leaves room for other kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Trait {
    Line(Line),
}

impl Trait {
    pub fn line(theta: f64, rho: f64) -> Self {
        Trait::Line(Line::new(theta, rho))
    }

    pub fn as_line(&self) -> &Line {
        match self {
            Trait::Line(l) => l,
        }
    }
}

/// Intersection point of two traits, or `None` when they are parallel within
/// `eps_angle` radians.
pub fn trait_intersection(a: &Trait, b: &Trait, eps_angle: f64) -> Option<Point2> {
    let (la, lb) = (a.as_line(), b.as_line());
    let (sa, ca) = la.theta.sin_cos();
    let (sb, cb) = lb.theta.sin_cos();
    let det = ca * sb - sa * cb;
    if det.abs() <= eps_angle.sin().max(f64::MIN_POSITIVE) {
        return None;
    }
    let x = (la.rho * sb - lb.rho * sa) / det;
    let y = (ca * lb.rho - cb * la.rho) / det;
    let p = Point2::new(x, y);
    p.is_finite().then_some(p)
}

/// Axis-aligned rectangle `[min.x, max.x] × [min.y, max.y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Self {
        Self { min, max }
    }

    pub fn from_size(width: f64, height: f64) -> Self {
        Self::new(Point2::new(0.0, 0.0), Point2::new(width, height))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        (self.min + self.max) * 0.5
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
            || !self.min.is_finite()
            || !self.max.is_finite()
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }

    /// Corners in positive (shoelace) order starting at `min`.
    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }

    /// The four sides as lines, in the order bottom (y = min), right, top, left.
    pub fn side_lines(&self) -> [Line; 4] {
        [
            Line::new(PI / 2.0, self.min.y),
            Line::new(0.0, self.max.x),
            Line::new(PI / 2.0, self.max.y),
            Line::new(0.0, self.min.x),
        ]
    }

    pub fn expanded(&self, margin: f64) -> Rect {
        Rect::new(
            Point2::new(self.min.x - margin, self.min.y - margin),
            Point2::new(self.max.x + margin, self.max.y + margin),
        )
    }
}
