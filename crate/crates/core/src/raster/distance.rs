use super::{OccupancyGrid, RasterError};
use crate::geometry::Point2;

/// Euclidean distance to the nearest occupied cell, normalized by its maximum
/// over the grid so that values lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    origin: Point2,
    max_distance: f64,
}

impl DistanceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    /// Distance in pixels that maps to 1.0.
    pub fn max_distance(&self) -> f64 {
        self.max_distance
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn cell_at(&self, p: Point2) -> Option<(usize, usize)> {
        let q = p - self.origin;
        if q.x < 0.0 || q.y < 0.0 {
            return None;
        }
        let (x, y) = (q.x.floor() as usize, q.y.floor() as usize);
        (x < self.width && y < self.height).then_some((x, y))
    }
}

/// Exact Euclidean distance transform (separable lower-envelope method) of the
/// occupied cells, normalized to `[0, 1]`. Unknown cells count as free.
pub fn distance_map(grid: &OccupancyGrid) -> Result<DistanceMap, RasterError> {
    let (w, h) = (grid.width(), grid.height());
    if grid.occupied_count() == 0 {
        return Err(RasterError::NoOccupiedCells);
    }
    let inf = ((w * w + h * h) as f64) * 4.0 + 1.0;
    let mut sq: Vec<f64> = grid
        .cells()
        .iter()
        .map(|c| {
            if *c == super::CellState::Occupied {
                0.0
            } else {
                inf
            }
        })
        .collect();

    let mut f = vec![0.0; w.max(h)];
    let mut out = vec![0.0; w.max(h)];
    let mut v = vec![0usize; w.max(h)];
    let mut z = vec![0.0; w.max(h) + 1];

    for x in 0..w {
        for y in 0..h {
            f[y] = sq[y * w + x];
        }
        edt_1d(&f[..h], &mut out[..h], &mut v, &mut z);
        for y in 0..h {
            sq[y * w + x] = out[y];
        }
    }
    for y in 0..h {
        f[..w].copy_from_slice(&sq[y * w..(y + 1) * w]);
        edt_1d(&f[..w], &mut out[..w], &mut v, &mut z);
        sq[y * w..(y + 1) * w].copy_from_slice(&out[..w]);
    }

    let max_sq = sq.iter().copied().fold(0.0, f64::max);
    if max_sq <= 0.0 {
        return Err(RasterError::NoFreeCells);
    }
    let max_distance = max_sq.sqrt();
    let values = sq.iter().map(|&d| d.sqrt() / max_distance).collect();
    Ok(DistanceMap {
        width: w,
        height: h,
        values,
        origin: grid.origin(),
        max_distance,
    })
}

/// One-dimensional squared distance transform of sampled function `f`.
fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let parabola_cut = |q: usize, p: usize| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    for q in 1..n {
        let mut s = parabola_cut(q, v[k]);
        // z[0] is -inf and costs stay finite, so this never underflows k
        while s <= z[k] {
            k -= 1;
            s = parabola_cut(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *out = dq * dq + f[p];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::CellState::{self, *};

    fn brute_force(grid: &OccupancyGrid) -> Vec<f64> {
        let (w, h) = (grid.width(), grid.height());
        let occ: Vec<(f64, f64)> = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .filter(|&(x, y)| grid.is_occupied(x, y))
            .map(|(x, y)| (x as f64, y as f64))
            .collect();
        let raw: Vec<f64> = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x as f64, y as f64)))
            .map(|(x, y)| {
                occ.iter()
                    .map(|&(ox, oy)| (x - ox).hypot(y - oy))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let m = raw.iter().copied().fold(0.0, f64::max);
        raw.iter().map(|d| d / m).collect()
    }

    #[test]
    fn linear_row() {
        let g = OccupancyGrid::new(3, 1, vec![Occupied, Free, Free]).unwrap();
        let d = distance_map(&g).unwrap();
        assert_eq!(d.values(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn all_occupied_is_an_error() {
        let g = OccupancyGrid::filled(4, 4, Occupied).unwrap();
        assert!(matches!(distance_map(&g), Err(RasterError::NoFreeCells)));
        let g = OccupancyGrid::filled(4, 4, Free).unwrap();
        assert!(matches!(
            distance_map(&g),
            Err(RasterError::NoOccupiedCells)
        ));
    }

    #[test]
    fn single_center_cell_matches_brute_force() {
        let mut g = OccupancyGrid::filled(5, 5, Free).unwrap();
        g.set(2, 2, Occupied);
        let d = distance_map(&g).unwrap();
        assert_eq!(d.get(2, 2), 0.0);
        assert!((d.get(0, 0) - 1.0).abs() < 1e-15);
        for (a, b) in d.values().iter().zip(brute_force(&g)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_counts_as_free() {
        let g = OccupancyGrid::new(3, 1, vec![Occupied, Unknown, Unknown]).unwrap();
        assert_eq!(distance_map(&g).unwrap().values(), &[0.0, 0.5, 1.0]);
    }

    proptest::proptest! {
        #[test]
        fn matches_brute_force_on_random_grids(
            w in 1usize..12, h in 1usize..12, seed in proptest::collection::vec(0u8..10, 144)
        ) {
            let cells: Vec<CellState> = (0..w * h)
                .map(|i| if seed[i] < 2 { Occupied } else if seed[i] < 4 { Unknown } else { Free })
                .collect();
            let g = OccupancyGrid::new(w, h, cells).unwrap();
            match distance_map(&g) {
                Ok(d) => {
                    let oracle = brute_force(&g);
                    for (a, b) in d.values().iter().zip(&oracle) {
                        proptest::prop_assert!((a - b).abs() < 1e-12);
                    }
                    let max = d.values().iter().copied().fold(0.0, f64::max);
                    proptest::prop_assert!((max - 1.0).abs() < 1e-15);
                    for (v, c) in d.values().iter().zip(g.cells()) {
                        proptest::prop_assert_eq!(*v == 0.0, *c == Occupied);
                    }
                }
                Err(_) => {
                    let occ = g.occupied_count();
                    proptest::prop_assert!(occ == 0 || occ == w * h);
                }
            }
        }
    }
}
