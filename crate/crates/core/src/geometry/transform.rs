use nalgebra::{Matrix2, Matrix3, Vector2};
use serde::{Deserialize, Serialize};

use super::{GeometryError, Point2};

/// Planar affine transform as a 3×3 homogeneous matrix with last row (0, 0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform2 {
    m: Matrix3<f64>,
}

impl Transform2 {
    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    /// `p ↦ scale · R(angle) · p + translation`.
    pub fn similarity(scale: f64, angle: f64, translation: Point2) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_parts(
            Matrix2::new(scale * c, -scale * s, scale * s, scale * c),
            translation,
        )
    }

    pub fn translation(t: Point2) -> Self {
        Self::from_parts(Matrix2::identity(), t)
    }

    pub(crate) fn from_parts(linear: Matrix2<f64>, t: Point2) -> Self {
        let mut m = Matrix3::identity();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&linear);
        m[(0, 2)] = t.x;
        m[(1, 2)] = t.y;
        Self { m }
    }

    /// `[a, b, tx, c, d, ty]` for `x' = a·x + b·y + tx`, `y' = c·x + d·y + ty`.
    pub fn from_affine(
        a: f64,
        b: f64,
        tx: f64,
        c: f64,
        d: f64,
        ty: f64,
    ) -> Result<Self, GeometryError> {
        let t = Self::from_parts(Matrix2::new(a, b, c, d), Point2::new(tx, ty));
        t.validate()?;
        Ok(t)
    }

    /// Parses nine row-major numbers; the last row must be (0, 0, 1).
    pub fn from_row_major(v: [f64; 9]) -> Result<Self, GeometryError> {
        if v[6] != 0.0 || v[7] != 0.0 || v[8] != 1.0 {
            return Err(GeometryError::NotAffine);
        }
        Self::from_affine(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    fn validate(&self) -> Result<(), GeometryError> {
        if self.m.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if self.determinant() == 0.0 {
            return Err(GeometryError::Singular);
        }
        Ok(())
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.m;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn linear(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn translation_part(&self) -> Point2 {
        Point2::new(self.m[(0, 2)], self.m[(1, 2)])
    }

    /// Determinant of the linear block.
    pub fn determinant(&self) -> f64 {
        self.linear().determinant()
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let m = &self.m;
        Point2::new(
            m[(0, 0)] * p.x + m[(0, 1)] * p.y + m[(0, 2)],
            m[(1, 0)] * p.x + m[(1, 1)] * p.y + m[(1, 2)],
        )
    }

    pub fn inverse(&self) -> Result<Self, GeometryError> {
        let lin = self.linear().try_inverse().ok_or(GeometryError::Singular)?;
        let t = lin * Vector2::new(self.m[(0, 2)], self.m[(1, 2)]);
        let inv = Self::from_parts(lin, Point2::new(-t.x, -t.y));
        inv.validate()?;
        Ok(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Transform2) -> Self {
        Self {
            m: self.m * other.m,
        }
    }

    /// Geometric mean scale, `sqrt(|det|)`.
    pub fn mean_scale(&self) -> f64 {
        self.determinant().abs().sqrt()
    }

    /// Rotation angle of the closest similarity, in `(-π, π]`.
    pub fn rotation_angle(&self) -> f64 {
        let l = self.linear();
        (l[(1, 0)] - l[(0, 1)]).atan2(l[(0, 0)] + l[(1, 1)])
    }
}

impl Serialize for Transform2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_row_major().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Transform2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <[f64; 9]>::deserialize(d)?;
        Transform2::from_row_major(v).map_err(serde::de::Error::custom)
    }
}

/// Singular values of the linear block plus the reflection flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleDecomposition {
    pub s_x: f64,
    pub s_y: f64,
    pub reflection: bool,
}

impl ScaleDecomposition {
    pub fn ratio(&self) -> f64 {
        self.s_x / self.s_y
    }
}

pub fn decompose_scales(t: &Transform2) -> ScaleDecomposition {
    let l = t.linear();
    let (a, b, c, d) = (l[(0, 0)], l[(0, 1)], l[(1, 0)], l[(1, 1)]);
    let frob = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let p = (frob + 2.0 * det.abs()).max(0.0).sqrt();
    let q = (frob - 2.0 * det.abs()).max(0.0).sqrt();
    ScaleDecomposition {
        s_x: 0.5 * (p + q),
        s_y: 0.5 * (p - q),
        reflection: det < 0.0,
    }
}

fn check_pairs(src: &[Point2], dst: &[Point2], min: usize) -> Result<(), GeometryError> {
    if src.len() != dst.len() {
        return Err(GeometryError::LengthMismatch(src.len(), dst.len()));
    }
    if src.len() < min {
        return Err(GeometryError::TooFewPoints {
            need: min,
            got: src.len(),
        });
    }
    if src.iter().chain(dst).any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    Ok(())
}

fn mean(points: &[Point2]) -> Point2 {
    let n = points.len() as f64;
    points.iter().fold(Point2::default(), |acc, &p| acc + p) * (1.0 / n)
}

/// Least-squares similarity (uniform scale, proper rotation, translation)
/// taking `src` onto `dst`, following Umeyama's closed form: SVD of the
/// cross-covariance with the determinant-sign correction.
pub fn estimate_similarity(src: &[Point2], dst: &[Point2]) -> Result<Transform2, GeometryError> {
    check_pairs(src, dst, 2)?;
    let n = src.len() as f64;
    let mu_s = mean(src);
    let mu_d = mean(dst);

    let mut var_s = 0.0;
    let mut cov = Matrix2::<f64>::zeros();
    for (s, d) in src.iter().zip(dst) {
        let s = *s - mu_s;
        let d = *d - mu_d;
        var_s += s.dot(s);
        cov += Vector2::new(d.x, d.y) * Vector2::new(s.x, s.y).transpose();
    }
    var_s /= n;
    cov /= n;
    let spread = src.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
    if var_s <= 1e-24 * spread * spread {
        return Err(GeometryError::Degenerate);
    }

    let svd = cov.svd(true, true);
    let u = svd.u.ok_or(GeometryError::Degenerate)?;
    let v_t = svd.v_t.ok_or(GeometryError::Degenerate)?;
    let sign = if u.determinant() * v_t.determinant() < 0.0 {
        -1.0
    } else {
        1.0
    };
    let fix = Matrix2::new(1.0, 0.0, 0.0, sign);
    let rotation = u * fix * v_t;
    let scale = (svd.singular_values[0] + sign * svd.singular_values[1]) / var_s;
    if !(scale > 0.0) {
        return Err(GeometryError::Degenerate);
    }
    let linear = rotation * scale;
    let t = Vector2::new(mu_d.x, mu_d.y) - linear * Vector2::new(mu_s.x, mu_s.y);
    let out = Transform2::from_parts(linear, Point2::new(t.x, t.y));
    out.validate()?;
    Ok(out)
}

/// Least-squares affine transform (six degrees of freedom) taking `src` onto `dst`.
pub fn estimate_affine(src: &[Point2], dst: &[Point2]) -> Result<Transform2, GeometryError> {
    check_pairs(src, dst, 3)?;
    let mu_s = mean(src);
    let mu_d = mean(dst);
    let mut sxx = Matrix2::<f64>::zeros();
    let mut dxs = Matrix2::<f64>::zeros();
    for (s, d) in src.iter().zip(dst) {
        let s = *s - mu_s;
        let d = *d - mu_d;
        let sv = Vector2::new(s.x, s.y);
        sxx += sv * sv.transpose();
        dxs += Vector2::new(d.x, d.y) * sv.transpose();
    }
    // rank test relative to the point spread
    let trace = sxx.trace();
    if !(trace > 0.0) || sxx.determinant() <= 1e-12 * trace * trace {
        return Err(GeometryError::RankDeficient);
    }
    let inv = sxx.try_inverse().ok_or(GeometryError::RankDeficient)?;
    let linear = dxs * inv;
    let t = Vector2::new(mu_d.x, mu_d.y) - linear * Vector2::new(mu_s.x, mu_s.y);
    let out = Transform2::from_parts(linear, Point2::new(t.x, t.y));
    out.validate()?;
    Ok(out)
}

/// Root-mean-square distance between `t(src_i)` and `dst_i`.
pub fn rms_residual(t: &Transform2, src: &[Point2], dst: &[Point2]) -> f64 {
    let n = src.len().max(1) as f64;
    let sum: f64 = src
        .iter()
        .zip(dst)
        .map(|(s, d)| {
            let r = t.apply(*s) - *d;
            r.dot(r)
        })
        .sum();
    (sum / n).sqrt()
}
