use std::f64::consts::PI;

use rayon::prelude::*;

use super::{OccupancyGrid, RasterError};
use crate::geometry::{Point2, Trait};

/// Radon accumulator indexed by (normal angle, signed offset).
///
/// A line with normal angle θ and offset ρ is the set `p · (cos θ, sin θ) = ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiographyAccumulator {
    angles: Vec<f64>,
    offsets: Vec<f64>,
    bins: Vec<f64>,
}

impl RadiographyAccumulator {
    /// Builds an accumulator from raw parts; `bins` is angle-major.
    pub fn from_parts(
        angles: Vec<f64>,
        offsets: Vec<f64>,
        bins: Vec<f64>,
    ) -> Result<Self, RasterError> {
        if bins.len() != angles.len() * offsets.len() {
            return Err(RasterError::SizeMismatch {
                expected: angles.len() * offsets.len(),
                got: bins.len(),
            });
        }
        if bins.iter().any(|b| !(*b >= 0.0)) {
            return Err(RasterError::NegativeBin);
        }
        Ok(Self {
            angles,
            offsets,
            bins,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    pub fn get(&self, angle: usize, offset: usize) -> f64 {
        self.bins[angle * self.offsets.len() + offset]
    }

    pub fn angle_step(&self) -> f64 {
        if self.angles.len() > 1 {
            self.angles[1] - self.angles[0]
        } else {
            PI
        }
    }

    pub fn offset_step(&self) -> f64 {
        if self.offsets.len() > 1 {
            self.offsets[1] - self.offsets[0]
        } else {
            1.0
        }
    }

    /// `(angle index, offset index, value)` of the largest bin; first in
    /// angle-major order on ties.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let n = self.offsets.len();
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.bins.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, v)| (i / n, i % n, v))
    }

    pub fn max_value(&self) -> f64 {
        self.bins.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn offset_index(&self, rho: f64) -> Option<usize> {
        let k = ((rho - self.offsets[0]) / self.offset_step()).round();
        (k >= 0.0 && (k as usize) < self.offsets.len()).then_some(k as usize)
    }
}

/// Smoothed gradient of the binarized grid (occupied = 1, else 0): a 3×3 box
/// blur followed by central differences. Cells outside the raster count as 0.
pub fn occupancy_gradient(grid: &OccupancyGrid) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (grid.width() as isize, grid.height() as isize);
    let bin = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else if grid.is_occupied(x as usize, y as usize) {
            1.0
        } else {
            0.0
        }
    };
    let mut blur = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut s = 0.0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    s += bin(x + dx, y + dy);
                }
            }
            blur[(y * w + x) as usize] = s / 9.0;
        }
    }
    let b = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            blur[(y * w + x) as usize]
        }
    };
    let mut gx = vec![0.0; (w * h) as usize];
    let mut gy = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            gx[i] = 0.5 * (b(x + 1, y) - b(x - 1, y));
            gy[i] = 0.5 * (b(x, y + 1) - b(x, y - 1));
        }
    }
    (gx, gy)
}

/// Gradient-weighted Radon transform.
///
/// Every cell votes at each normal angle, split linearly between the two
/// offset bins around its center, with weight `|∇| · |sin(φ − ψ)|`, where φ is the gradient orientation and
/// ψ = θ + π/2 is the projection (integration) direction. The product equals
/// `|∇ · n(θ)|`: full weight when the gradient is across the projection
/// direction, zero when along it.
///
/// Angle rows are accumulated independently, so the result does not depend
/// on the thread count.
pub fn radiography(
    grid: &OccupancyGrid,
    angle_bins: usize,
    offset_bin_size: f64,
) -> Result<RadiographyAccumulator, RasterError> {
    if angle_bins < 2 {
        return Err(RasterError::InvalidParameter(format!(
            "angle_bins must be >= 2, got {angle_bins}"
        )));
    }
    if !(offset_bin_size > 0.0) || !offset_bin_size.is_finite() {
        return Err(RasterError::InvalidParameter(format!(
            "offset_bin_size must be positive, got {offset_bin_size}"
        )));
    }
    let (gx, gy) = occupancy_gradient(grid);
    let voters: Vec<(Point2, f64, f64)> = (0..grid.height())
        .flat_map(|y| (0..grid.width()).map(move |x| (x, y)))
        .filter_map(|(x, y)| {
            let i = y * grid.width() + x;
            (gx[i] != 0.0 || gy[i] != 0.0).then(|| (grid.cell_center(x, y), gx[i], gy[i]))
        })
        .collect();

    let bounds = grid.bounds();
    let reach = bounds
        .corners()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .ceil()
        + offset_bin_size;
    let n_offsets = (2.0 * reach / offset_bin_size).ceil() as usize + 1;
    let first = -reach + 0.5 * offset_bin_size;
    let offsets: Vec<f64> = (0..n_offsets)
        .map(|k| first + k as f64 * offset_bin_size)
        .collect();
    let angles: Vec<f64> = (0..angle_bins)
        .map(|k| k as f64 * PI / angle_bins as f64)
        .collect();

    let rows: Vec<Vec<f64>> = angles
        .par_iter()
        .map(|&theta| {
            let (s, c) = theta.sin_cos();
            let mut row = vec![0.0; n_offsets];
            for &(p, gx, gy) in &voters {
                let pos = (p.x * c + p.y * s - first) / offset_bin_size;
                let k = pos.floor();
                if k < 0.0 || k as usize + 1 >= n_offsets {
                    continue;
                }
                let frac = pos - k;
                let w = (gx * c + gy * s).abs();
                row[k as usize] += w * (1.0 - frac);
                row[k as usize + 1] += w * frac;
            }
            row
        })
        .collect();
    let bins = rows.concat();
    Ok(RadiographyAccumulator {
        angles,
        offsets,
        bins,
    })
}

/// Local maxima of the accumulator above `peak_threshold_ratio` times the
/// global maximum, thinned by greedy non-maximum suppression (strongest
/// offset-window energy first) over an
/// (angle, offset) window of `nms_radius` bins. Each candidate offset is
/// refined to the weighted centroid of its ridge (mean shift within the
/// window) before suppression. The angle axis wraps with the offset mirrored.
pub fn detect_line_traits(
    acc: &RadiographyAccumulator,
    peak_threshold_ratio: f64,
    nms_radius: usize,
) -> Result<Vec<Trait>, RasterError> {
    if !(peak_threshold_ratio > 0.0 && peak_threshold_ratio <= 1.0) {
        return Err(RasterError::InvalidParameter(format!(
            "peak_threshold_ratio must lie in (0, 1], got {peak_threshold_ratio}"
        )));
    }
    let global = acc.max_value();
    if acc.bins.is_empty() || !(global > 0.0) {
        return Err(RasterError::EmptyAccumulator);
    }
    let n_ang = acc.angles.len();
    let n_off = acc.offsets.len();
    let r = nms_radius as isize;
    let threshold = peak_threshold_ratio * global;

    // neighbor lookup honoring the (θ + π, -ρ) identification
    let neighbor = |a: usize, o: usize, da: isize, dof: isize| -> Option<f64> {
        let na = a as isize + da;
        let (wrapped_a, mirrored) = if na < 0 {
            (na + n_ang as isize, true)
        } else if na >= n_ang as isize {
            (na - n_ang as isize, true)
        } else {
            (na, false)
        };
        let rho = acc.offsets[o] + dof as f64 * acc.offset_step();
        let rho = if mirrored { -rho } else { rho };
        let k = acc.offset_index(rho)?;
        Some(acc.get(wrapped_a as usize, k))
    };

    let mut local_max: Vec<(usize, usize)> = Vec::new();
    for a in 0..n_ang {
        for o in 0..n_off {
            let v = acc.get(a, o);
            if v < threshold || v <= 0.0 {
                continue;
            }
            let mut is_max = true;
            'window: for da in -r..=r {
                for dof in -r..=r {
                    if da == 0 && dof == 0 {
                        continue;
                    }
                    if let Some(nv) = neighbor(a, o, da, dof) {
                        if nv > v {
                            is_max = false;
                            break 'window;
                        }
                    }
                }
            }
            if is_max {
                local_max.push((a, o));
            }
        }
    }
    // A thin wall yields a two-bin plateau whose height barely changes for
    // small tilts, so candidates are ranked by the energy of their offset
    // window, which is largest where the ridge is sharpest.
    let energy = |a: usize, o: usize| -> f64 {
        let lo = o.saturating_sub(nms_radius);
        let hi = (o + nms_radius).min(n_off - 1);
        (lo..=hi).map(|k| acc.get(a, k).powi(2)).sum()
    };
    let mut candidates: Vec<(usize, usize, f64)> = local_max
        .into_iter()
        .map(|(a, o)| (a, o, energy(a, o)))
        .collect();
    candidates.sort_by(|x, y| y.2.total_cmp(&x.2).then(x.0.cmp(&y.0)).then(x.1.cmp(&y.1)));

    // suppression compares refined offsets, so both flanks of a thin wall
    // collapse onto one line
    let step = acc.offset_step();
    let mut accepted: Vec<(usize, f64)> = Vec::new();
    for &(a, o, _) in &candidates {
        let rho = refine_offset(acc, a, o, nms_radius);
        let suppressed = accepted.iter().any(|&(pa, prho)| {
            let direct = (a as isize - pa as isize).abs();
            if direct <= r {
                return (rho - prho).abs() / step <= r as f64 + 1e-9;
            }
            let wrapped = n_ang as isize - direct;
            wrapped <= r && (rho + prho).abs() / step <= r as f64 + 1e-9
        });
        if !suppressed {
            accepted.push((a, rho));
        }
    }

    Ok(accepted
        .into_iter()
        .map(|(a, rho)| Trait::line(acc.angles[a], rho))
        .collect())
}

fn refine_offset(acc: &RadiographyAccumulator, a: usize, o: usize, radius: usize) -> f64 {
    let n_off = acc.offsets.len();
    let mut center = o as f64;
    for _ in 0..8 {
        let lo = (center - radius as f64).ceil().max(0.0) as usize;
        let hi = ((center + radius as f64).floor() as usize).min(n_off - 1);
        let (mut sw, mut swx) = (0.0, 0.0);
        for k in lo..=hi {
            let v = acc.get(a, k);
            sw += v;
            swx += v * k as f64;
        }
        if sw <= 0.0 {
            break;
        }
        let next = swx / sw;
        if (next - center).abs() < 1e-6 {
            center = next;
            break;
        }
        center = next;
    }
    acc.offsets[0] + center * acc.offset_step()
}
