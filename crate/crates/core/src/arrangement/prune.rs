use std::collections::HashSet;

use super::build::{absorb_degenerate_faces, assemble, strip_dangling, UnionFind};
use super::{Arrangement, ArrangementError, Edge};
use crate::geometry::Point2;
use crate::raster::{CellState, DistanceMap, OccupancyGrid};

/// What [`prune`] did, indexed by the edges of its input arrangement.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PruneReport {
    /// Mean distance-map value around each edge; `None` for frame edges and
    /// for edges whose neighborhood misses the map.
    pub edge_values: Vec<Option<f64>>,
    /// Edges removed because their value reached the threshold.
    pub removed: Vec<usize>,
    /// Edges at or above the threshold kept because both sides already belong
    /// to one region (removing them would leave a hole or a dangling wall).
    pub retained: Vec<usize>,
    /// Edges without any distance-map cell nearby; treated as removable.
    pub empty_neighborhoods: Vec<usize>,
    pub faces_before: usize,
    pub faces_after: usize,
}

/// Mean of `dmap` over the cells within `band_radius` of the cells crossed by
/// segment `a`–`b`. `None` when no such cell lies inside the map.
pub fn edge_value(dmap: &DistanceMap, a: Point2, b: Point2, band_radius: f64) -> Option<f64> {
    let (w, h) = (dmap.width() as i64, dmap.height() as i64);
    let r = band_radius.max(0.0);
    let ri = r.floor() as i64;
    let disk: Vec<(i64, i64)> = (-ri..=ri)
        .flat_map(|dy| (-ri..=ri).map(move |dx| (dx, dy)))
        .filter(|&(dx, dy)| ((dx * dx + dy * dy) as f64) <= r * r + 1e-9)
        .collect();
    let o = dmap.origin();
    let mut cells: Vec<usize> = Vec::new();
    for (cx, cy) in supercover(a - o, b - o) {
        for &(dx, dy) in &disk {
            let (x, y) = (cx + dx, cy + dy);
            if x >= 0 && y >= 0 && x < w && y < h {
                cells.push((y * w + x) as usize);
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    if cells.is_empty() {
        return None;
    }
    Some(cells.iter().map(|&i| dmap.values()[i]).sum::<f64>() / cells.len() as f64)
}

/// Integer cells touched by the segment `a`–`b` in grid coordinates. When
/// the segment passes exactly through a cell corner both side cells are
/// included.
fn supercover(a: Point2, b: Point2) -> Vec<(i64, i64)> {
    let (mut x, mut y) = (a.x.floor() as i64, a.y.floor() as i64);
    let (ex, ey) = (b.x.floor() as i64, b.y.floor() as i64);
    let d = b - a;
    let step_x = if d.x > 0.0 { 1 } else { -1 };
    let step_y = if d.y > 0.0 { 1 } else { -1 };
    let boundary = |c: i64, step: i64| if step > 0 { (c + 1) as f64 } else { c as f64 };
    let mut t_max_x = if d.x != 0.0 {
        (boundary(x, step_x) - a.x) / d.x
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if d.y != 0.0 {
        (boundary(y, step_y) - a.y) / d.y
    } else {
        f64::INFINITY
    };
    let dt_x = if d.x != 0.0 {
        (1.0 / d.x).abs()
    } else {
        f64::INFINITY
    };
    let dt_y = if d.y != 0.0 {
        (1.0 / d.y).abs()
    } else {
        f64::INFINITY
    };

    let mut out = vec![(x, y)];
    let budget = (ex - x).abs() + (ey - y).abs() + 2;
    for _ in 0..budget {
        if (x, y) == (ex, ey) {
            break;
        }
        if t_max_x < t_max_y {
            x += step_x;
            t_max_x += dt_x;
        } else if t_max_y < t_max_x {
            y += step_y;
            t_max_y += dt_y;
        } else {
            out.push((x + step_x, y));
            out.push((x, y + step_y));
            x += step_x;
            y += step_y;
            t_max_x += dt_x;
            t_max_y += dt_y;
        }
        out.push((x, y));
    }
    out
}

/// Merges regions separated by edges running through open space.
///
/// Each non-frame edge is scored by [`edge_value`]. Edges at or above
/// `threshold` are visited from the highest value down and removed when the
/// two faces they separate are not yet merged; the rest of them survive.
/// Afterwards surviving high-value edges that dangle are removed, degenerate
/// faces are absorbed and the faces are traced again.
///
/// The union of the faces is preserved, and no face gains a hole it did not
/// have.
pub fn prune(
    arr: &Arrangement,
    dmap: &DistanceMap,
    threshold: f64,
    band_radius: f64,
) -> Result<(Arrangement, PruneReport), ArrangementError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(ArrangementError::InvalidParameter(format!(
            "edge threshold must lie in (0, 1), got {threshold}"
        )));
    }
    if !(band_radius >= 0.0) || !band_radius.is_finite() {
        return Err(ArrangementError::InvalidParameter(format!(
            "band radius must be non-negative, got {band_radius}"
        )));
    }
    let prime = arr.prime();
    let n_edges = prime.edges().len();
    let mut report = PruneReport {
        edge_values: vec![None; n_edges],
        faces_before: arr.faces().len(),
        ..Default::default()
    };

    let mut candidates: Vec<(f64, usize)> = Vec::new();
    for (e, edge) in prime.edges().iter().enumerate() {
        if edge.host.is_frame() {
            continue;
        }
        let (a, b) = prime.segment(e);
        match edge_value(dmap, a, b, band_radius) {
            Some(v) => {
                report.edge_values[e] = Some(v);
                if v >= threshold {
                    candidates.push((v, e));
                }
            }
            None => {
                log::warn!("edge {e} has no distance-map cells nearby; treating it as removable");
                report.empty_neighborhoods.push(e);
                candidates.push((f64::INFINITY, e));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut regions = UnionFind::new(arr.faces().len());
    let mut removed = vec![false; n_edges];
    for &(_, e) in &candidates {
        match arr.edge_faces(e) {
            (Some(fa), Some(fb)) if regions.union(fa, fb) => removed[e] = true,
            _ => report.retained.push(e),
        }
    }

    let candidate_pairs: HashSet<(usize, usize)> = candidates
        .iter()
        .map(|&(_, e)| key(&prime.edges()[e]))
        .collect();
    let kept: Vec<Edge> = prime
        .edges()
        .iter()
        .enumerate()
        .filter(|&(e, _)| !removed[e])
        .map(|(_, e)| *e)
        .collect();
    let (kept, dangling) = strip_dangling(prime.vertices().len(), kept, |e| {
        candidate_pairs.contains(&key(e))
    });
    let dangling: HashSet<(usize, usize)> = dangling.iter().map(key).collect();
    for (e, edge) in prime.edges().iter().enumerate() {
        if dangling.contains(&key(edge)) {
            removed[e] = true;
        }
    }
    report.retained.retain(|&e| !removed[e]);
    report.retained.sort_unstable();
    report.removed = (0..n_edges).filter(|&e| removed[e]).collect();

    let out = assemble(
        arr.traits().to_vec(),
        arr.frame(),
        prime.vertices().to_vec(),
        kept,
    );
    let out = absorb_degenerate_faces(out);
    report.faces_after = out.faces().len();
    Ok((out, report))
}

fn key(e: &Edge) -> (usize, usize) {
    (e.start.min(e.end), e.start.max(e.end))
}

/// Keeps the faces that are rooms of `grid`: not bounded by the frame and
/// with at least `min_free_fraction` of their cells free.
pub fn restrict_to_interior(
    arr: &Arrangement,
    grid: &OccupancyGrid,
    min_free_fraction: f64,
) -> Arrangement {
    arr.retain_faces(|i, face| {
        if arr.face_touches_frame(i) {
            return false;
        }
        let (lo, hi) = face.polygon().bounds();
        let o = grid.origin();
        let x0 = ((lo.x - o.x).floor().max(0.0) as usize).min(grid.width());
        let y0 = ((lo.y - o.y).floor().max(0.0) as usize).min(grid.height());
        let x1 = ((hi.x - o.x).ceil().max(0.0) as usize).min(grid.width());
        let y1 = ((hi.y - o.y).ceil().max(0.0) as usize).min(grid.height());
        let (mut inside, mut free) = (0usize, 0usize);
        for y in y0..y1 {
            for x in x0..x1 {
                if face.polygon().contains(grid.cell_center(x, y)) {
                    inside += 1;
                    if grid.get(x, y) == CellState::Free {
                        free += 1;
                    }
                }
            }
        }
        inside == 0 || free as f64 >= min_free_fraction * inside as f64
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::arrangement::build_arrangement;
    use crate::geometry::{Rect, Trait};
    use crate::raster::distance_map;

    #[test]
    fn supercover_includes_corner_neighbors() {
        let c = supercover(Point2::new(0.5, 0.5), Point2::new(2.5, 2.5));
        assert_eq!(
            c,
            vec![(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)]
        );
        let c = supercover(Point2::new(3.2, 1.5), Point2::new(0.7, 1.5));
        assert_eq!(c, vec![(3, 1), (2, 1), (1, 1), (0, 1)]);
        assert_eq!(
            supercover(Point2::new(1.5, 1.5), Point2::new(1.6, 1.2)),
            vec![(1, 1)]
        );
    }

    /// Two 20 x 20 rooms side by side with a wall at x = 20 and a door.
    fn two_rooms() -> (OccupancyGrid, Vec<Trait>) {
        let mut g = OccupancyGrid::filled(42, 22, CellState::Free).unwrap();
        for x in 0..42 {
            g.set(x, 0, CellState::Occupied);
            g.set(x, 21, CellState::Occupied);
        }
        for y in 0..22 {
            for x in [0, 20, 41] {
                if !(x == 20 && (9..13).contains(&y)) {
                    g.set(x, y, CellState::Occupied);
                }
            }
        }
        let traits = vec![
            Trait::line(0.0, 0.5),
            Trait::line(0.0, 20.5),
            Trait::line(0.0, 41.5),
            Trait::line(PI / 2.0, 0.5),
            Trait::line(PI / 2.0, 21.5),
            // a spurious line through the middle of both rooms
            Trait::line(PI / 2.0, 11.0),
        ];
        (g, traits)
    }

    #[test]
    fn spurious_split_is_removed_and_walls_kept() {
        let (g, traits) = two_rooms();
        let g = g.padded(4, CellState::Free);
        let arr = build_arrangement(&traits, g.bounds()).unwrap();
        let dmap = distance_map(&g).unwrap();
        let (pruned, report) = prune(&arr, &dmap, 0.3, 1.5).unwrap();
        for &e in &report.removed {
            let v = report.edge_values[e].unwrap();
            assert!(v >= 0.3, "removed edge {e} with value {v}");
        }
        let interior = restrict_to_interior(&pruned, &g, 0.5);
        assert_eq!(
            interior.faces().len(),
            2,
            "{:?}",
            interior
                .faces()
                .iter()
                .map(|f| f.area())
                .collect::<Vec<_>>()
        );
        for f in interior.faces() {
            assert!((f.area() - 21.0 * 20.0).abs() < 25.0, "area {}", f.area());
        }
        assert!((pruned.total_face_area() - arr.total_face_area()).abs() < 1e-6);
        assert_eq!(pruned.euler_characteristic(), 2);
    }

    #[test]
    fn extreme_thresholds_keep_everything_or_merge_all() {
        let (g, traits) = two_rooms();
        let arr = build_arrangement(&traits, Rect::from_size(42.0, 22.0).expanded(4.0)).unwrap();
        let g = g.padded(4, CellState::Free);
        let dmap = distance_map(&g).unwrap();
        let (same, report) = prune(&arr, &dmap, 0.999, 1.5).unwrap();
        assert_eq!(same.faces().len(), arr.faces().len());
        assert!(report.removed.is_empty());
        let (one, _) = prune(&arr, &dmap, 1e-6, 1.5).unwrap();
        assert_eq!(one.faces().len(), 1);
        assert!((one.total_face_area() - arr.total_face_area()).abs() < 1e-6);
        assert!(prune(&arr, &dmap, 1.0, 1.0).is_err());
        assert!(prune(&arr, &dmap, 0.0, 1.0).is_err());
        assert!(prune(&arr, &dmap, 0.5, -1.0).is_err());
    }
}
