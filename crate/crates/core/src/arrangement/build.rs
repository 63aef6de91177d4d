use std::collections::{BTreeSet, HashMap, HashSet};

use super::{
    half_edge_origin, Arrangement, ArrangementError, BoundaryStep, Edge, EdgeHost, Face,
    PrimeGraph, MIN_FACE_AREA, VERTEX_MERGE_EPS,
};
use crate::geometry::{
    signed_area, trait_intersection, Line, Point2, Polygon, Rect, Trait, EXACT_PARALLEL_EPS,
};

/// Intersection vertex before merging.
struct RawVertex {
    pos: Point2,
    /// Bit k set when the point lies exactly on frame side k.
    sides: u8,
}

/// Builds the prime graph of `traits` clipped to `frame`, traces its faces
/// and absorbs degenerate slivers into their largest neighbor.
///
/// Traits that miss the frame stay in [`Arrangement::traits`] but host no
/// edge. Fails when fewer than two traits cross the frame or when no two of
/// them meet inside it.
pub fn build_arrangement(traits: &[Trait], frame: Rect) -> Result<Arrangement, ArrangementError> {
    if frame.is_degenerate() {
        return Err(ArrangementError::DegenerateFrame);
    }
    let scale = frame.width().max(frame.height());
    let tol = 1e-9 * scale;
    let sides = frame.side_lines();

    let mut raw: Vec<RawVertex> = Vec::new();
    // (host, raw vertex) memberships; the parameter along the host orders them
    let mut on_line: Vec<(EdgeHost, usize)> = Vec::new();

    for (k, c) in frame.corners().into_iter().enumerate() {
        // corner k joins side k and the side before it
        let prev = (k + 3) % 4;
        raw.push(RawVertex {
            pos: c,
            sides: (1 << k) | (1 << prev),
        });
        on_line.push((EdgeHost::Frame(k), raw.len() - 1));
        on_line.push((EdgeHost::Frame(prev), raw.len() - 1));
    }

    let mut crossing = Vec::new();
    for (i, t) in traits.iter().enumerate() {
        let Some((a, b)) = clip_to_frame(t.as_line(), &frame, tol) else {
            continue;
        };
        crossing.push(i);
        for p in [a, b] {
            let (pos, mask) = snap_to_frame(p, &frame, tol);
            raw.push(RawVertex { pos, sides: mask });
            let id = raw.len() - 1;
            on_line.push((EdgeHost::Trait(i), id));
            for k in 0..4 {
                if mask & (1 << k) != 0 {
                    on_line.push((EdgeHost::Frame(k), id));
                }
            }
        }
    }
    if crossing.len() < 2 {
        return Err(ArrangementError::TooFewTraits(crossing.len()));
    }

    let mut interior_crossings = 0usize;
    for (n, &i) in crossing.iter().enumerate() {
        for &j in &crossing[n + 1..] {
            let Some(p) = trait_intersection(&traits[i], &traits[j], EXACT_PARALLEL_EPS) else {
                continue;
            };
            if !frame.contains(p, tol) {
                continue;
            }
            let (pos, mask) = snap_to_frame(p, &frame, tol);
            if mask == 0 {
                interior_crossings += 1;
            }
            raw.push(RawVertex { pos, sides: mask });
            let id = raw.len() - 1;
            on_line.push((EdgeHost::Trait(i), id));
            on_line.push((EdgeHost::Trait(j), id));
            for k in 0..4 {
                if mask & (1 << k) != 0 {
                    on_line.push((EdgeHost::Frame(k), id));
                }
            }
        }
    }
    if interior_crossings == 0 {
        return Err(ArrangementError::NoBoundedFace);
    }

    let (vertices, merged) = merge_vertices(&raw, &frame);

    // host lines in a fixed order: frame sides first so that they win
    // deduplication against traits lying on the frame
    let mut by_host: HashMap<EdgeHost, Vec<usize>> = HashMap::new();
    for &(host, id) in &on_line {
        by_host.entry(host).or_default().push(id);
    }
    let mut hosts: Vec<EdgeHost> = by_host.keys().copied().collect();
    hosts.sort();
    hosts.sort_by_key(|h| !h.is_frame());

    let mut edges = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for host in hosts {
        let line: Line = match host {
            EdgeHost::Frame(k) => sides[k],
            EdgeHost::Trait(i) => *traits[i].as_line(),
        };
        let mut pts: Vec<(f64, usize)> = by_host[&host]
            .iter()
            .map(|&id| (line.param(raw[id].pos), merged[id]))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        pts.dedup_by_key(|p| p.1);
        for w in pts.windows(2) {
            let (u, v) = (w[0].1, w[1].1);
            if u == v {
                continue;
            }
            if seen.insert((u.min(v), u.max(v))) {
                edges.push(Edge {
                    host,
                    start: u,
                    end: v,
                });
            }
        }
    }

    let arr = assemble(traits.to_vec(), frame, vertices, edges);
    Ok(absorb_degenerate_faces(arr))
}

/// Segment of `line` inside `frame`, if it has positive length.
fn clip_to_frame(line: &Line, frame: &Rect, tol: f64) -> Option<(Point2, Point2)> {
    let a = line.anchor();
    let d = line.direction();
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, dp, lo, hi) in [
        (a.x, d.x, frame.min.x, frame.max.x),
        (a.y, d.y, frame.min.y, frame.max.y),
    ] {
        if dp.abs() < 1e-12 {
            if p < lo - tol || p > hi + tol {
                return None;
            }
            continue;
        }
        let (ta, tb) = ((lo - p) / dp, (hi - p) / dp);
        t0 = t0.max(ta.min(tb));
        t1 = t1.min(ta.max(tb));
    }
    (t1 - t0 > tol).then(|| (line.point_at(t0), line.point_at(t1)))
}

/// Clamps `p` into the frame and pins coordinates within `tol` of a side onto
/// it exactly. Returns the position and the side mask.
fn snap_to_frame(p: Point2, frame: &Rect, tol: f64) -> (Point2, u8) {
    let mut q = Point2::new(
        p.x.clamp(frame.min.x, frame.max.x),
        p.y.clamp(frame.min.y, frame.max.y),
    );
    let mut mask = 0u8;
    if (q.y - frame.min.y).abs() <= tol {
        q.y = frame.min.y;
        mask |= 1;
    }
    if (q.x - frame.max.x).abs() <= tol {
        q.x = frame.max.x;
        mask |= 2;
    }
    if (q.y - frame.max.y).abs() <= tol {
        q.y = frame.max.y;
        mask |= 4;
    }
    if (q.x - frame.min.x).abs() <= tol {
        q.x = frame.min.x;
        mask |= 8;
    }
    (q, mask)
}

pub(super) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(super) fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub(super) fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// Joins the sets of `a` and `b`; false when already joined.
    pub(super) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // smaller root wins so results do not depend on call order
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }
}

/// Clusters raw vertices closer than [`VERTEX_MERGE_EPS`] (transitively).
/// Returns the merged positions and the cluster of each raw vertex.
fn merge_vertices(raw: &[RawVertex], frame: &Rect) -> (Vec<Point2>, Vec<usize>) {
    let cell = VERTEX_MERGE_EPS;
    let key = |p: Point2| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, v) in raw.iter().enumerate() {
        buckets.entry(key(v.pos)).or_default().push(i);
    }
    let mut uf = UnionFind::new(raw.len());
    for (i, v) in raw.iter().enumerate() {
        let (kx, ky) = key(v.pos);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = buckets.get(&(kx + dx, ky + dy)) {
                    for &j in bucket {
                        if j > i && v.pos.distance(raw[j].pos) < VERTEX_MERGE_EPS {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }

    let mut root_to_id: HashMap<usize, usize> = HashMap::new();
    let mut merged = vec![0; raw.len()];
    let mut sums: Vec<(Point2, usize, u8)> = Vec::new();
    for (i, v) in raw.iter().enumerate() {
        let r = uf.find(i);
        let id = *root_to_id.entry(r).or_insert_with(|| {
            sums.push((Point2::default(), 0, 0));
            sums.len() - 1
        });
        merged[i] = id;
        sums[id].0 = sums[id].0 + v.pos;
        sums[id].1 += 1;
        sums[id].2 |= v.sides;
    }
    let vertices = sums
        .into_iter()
        .map(|(s, n, mask)| {
            let mut p = s * (1.0 / n as f64);
            if mask & 1 != 0 {
                p.y = frame.min.y;
            }
            if mask & 2 != 0 {
                p.x = frame.max.x;
            }
            if mask & 4 != 0 {
                p.y = frame.max.y;
            }
            if mask & 8 != 0 {
                p.x = frame.min.x;
            }
            p
        })
        .collect();
    (vertices, merged)
}

/// Drops isolated vertices, traces the faces of the remaining plane graph and
/// derives the neighborhood relation.
pub(super) fn assemble(
    traits: Vec<Trait>,
    frame: Rect,
    vertices: Vec<Point2>,
    edges: Vec<Edge>,
) -> Arrangement {
    let mut used = vec![false; vertices.len()];
    for e in &edges {
        used[e.start] = true;
        used[e.end] = true;
    }
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for (i, p) in vertices.into_iter().enumerate() {
        if used[i] {
            remap[i] = kept.len();
            kept.push(p);
        }
    }
    let edges: Vec<Edge> = edges
        .into_iter()
        .map(|e| Edge {
            host: e.host,
            start: remap[e.start],
            end: remap[e.end],
        })
        .collect();
    let prime = PrimeGraph::new(kept, edges);

    let n_half = 2 * prime.edges.len();
    let mut visited = vec![false; n_half];
    let mut half_edge_face = vec![None; n_half];
    let mut faces = Vec::new();
    for start in 0..n_half {
        if visited[start] {
            continue;
        }
        let mut loop_h = Vec::new();
        let mut h = start;
        while !visited[h] {
            visited[h] = true;
            loop_h.push(h);
            h = prime.next(h);
        }
        let vertex_loop: Vec<usize> = loop_h
            .iter()
            .map(|&h| half_edge_origin(&prime.edges, h))
            .collect();
        let pts: Vec<Point2> = vertex_loop.iter().map(|&v| prime.vertices[v]).collect();
        if signed_area(&pts) <= 0.0 {
            continue;
        }
        let Ok(poly) = Polygon::new(pts) else {
            continue;
        };
        let distinct: BTreeSet<usize> = vertex_loop.iter().copied().collect();
        let centroid = distinct
            .iter()
            .fold(Point2::default(), |acc, &v| acc + prime.vertices[v])
            * (1.0 / distinct.len() as f64);
        for &h in &loop_h {
            half_edge_face[h] = Some(faces.len());
        }
        faces.push(Face {
            boundary: loop_h
                .iter()
                .map(|&h| BoundaryStep {
                    edge: h / 2,
                    forward: h % 2 == 0,
                })
                .collect(),
            vertex_loop,
            area: poly.area(),
            polygon: poly,
            centroid,
        });
    }

    let mut neighborhood = BTreeSet::new();
    for e in 0..prime.edges.len() {
        if let (Some(a), Some(b)) = (half_edge_face[2 * e], half_edge_face[2 * e + 1]) {
            if a != b {
                neighborhood.insert((a.min(b), a.max(b)));
            }
        }
    }

    Arrangement {
        traits,
        frame,
        prime,
        faces,
        half_edge_face,
        neighborhood,
    }
}

fn is_degenerate(face: &Face) -> bool {
    face.area < MIN_FACE_AREA || face.distinct_vertex_count() < 3
}

/// Removes dangling non-frame edges (an endpoint of degree one) until none
/// remain, for which `removable` holds. Returns the surviving edges and the
/// removed ones.
pub(super) fn strip_dangling(
    n_vertices: usize,
    edges: Vec<Edge>,
    mut removable: impl FnMut(&Edge) -> bool,
) -> (Vec<Edge>, Vec<Edge>) {
    let mut degree = vec![0usize; n_vertices];
    for e in &edges {
        degree[e.start] += 1;
        degree[e.end] += 1;
    }
    let mut alive = vec![true; edges.len()];
    loop {
        let mut changed = false;
        for (i, e) in edges.iter().enumerate() {
            if alive[i]
                && !e.host.is_frame()
                && (degree[e.start] == 1 || degree[e.end] == 1)
                && removable(e)
            {
                alive[i] = false;
                degree[e.start] -= 1;
                degree[e.end] -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let (mut kept, mut removed) = (Vec::new(), Vec::new());
    for (e, a) in edges.into_iter().zip(alive) {
        if a {
            kept.push(e);
        } else {
            removed.push(e);
        }
    }
    (kept, removed)
}

/// Merges every face below [`MIN_FACE_AREA`] (or with fewer than three
/// distinct vertices) into its largest neighbor by deleting the edges they
/// share. Edges left dangling are deleted as well.
pub(super) fn absorb_degenerate_faces(mut arr: Arrangement) -> Arrangement {
    // each pass removes at least one face, so this bounds the work
    for _ in 0..=arr.faces.len() {
        let target = (0..arr.faces.len())
            .filter(|&i| is_degenerate(&arr.faces[i]))
            .filter_map(|i| largest_neighbor(&arr, i).map(|n| (i, n)))
            .min_by(|a, b| {
                arr.faces[a.0]
                    .area
                    .total_cmp(&arr.faces[b.0].area)
                    .then(a.0.cmp(&b.0))
            });
        let Some((small, big)) = target else {
            break;
        };
        let edges: Vec<Edge> = arr
            .prime
            .edges
            .iter()
            .enumerate()
            .filter(|&(e, _)| {
                let (a, b) = arr.edge_faces(e);
                !(a == Some(small) && b == Some(big) || a == Some(big) && b == Some(small))
            })
            .map(|(_, e)| *e)
            .collect();
        let (edges, _) = strip_dangling(arr.prime.vertices.len(), edges, |_| true);
        arr = assemble(arr.traits, arr.frame, arr.prime.vertices, edges);
    }
    arr
}

fn largest_neighbor(arr: &Arrangement, i: usize) -> Option<usize> {
    arr.faces[i]
        .boundary
        .iter()
        .filter(|s| !arr.prime.edges[s.edge].host.is_frame())
        .filter_map(|s| {
            let (a, b) = arr.edge_faces(s.edge);
            let other = if a == Some(i) { b } else { a };
            other.filter(|&o| o != i)
        })
        .max_by(|&a, &b| {
            arr.faces[a]
                .area
                .total_cmp(&arr.faces[b].area)
                .then(b.cmp(&a))
        })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn hv(xs: &[f64], ys: &[f64]) -> Vec<Trait> {
        xs.iter()
            .map(|&x| Trait::line(0.0, x))
            .chain(ys.iter().map(|&y| Trait::line(PI / 2.0, y)))
            .collect()
    }

    #[test]
    fn two_by_two_lines_give_nine_cells() {
        let arr = build_arrangement(
            &hv(&[30.0, 60.0], &[20.0, 50.0]),
            Rect::from_size(100.0, 80.0),
        )
        .unwrap();
        assert_eq!(arr.faces().len(), 9);
        // 4 crossings, 8 frame hits, 4 corners
        assert_eq!(arr.prime().vertices().len(), 16);
        assert_eq!(arr.euler_characteristic(), 2);
        assert!((arr.total_face_area() - 8000.0).abs() < 1e-9);
        let center = arr
            .faces()
            .iter()
            .find(|f| f.centroid().distance(Point2::new(45.0, 35.0)) < 1e-12)
            .expect("central cell");
        assert!((center.area() - 900.0).abs() < 1e-9);
        // the center cell borders four others, corner cells two
        let deg = |f: usize| {
            arr.neighborhood()
                .iter()
                .filter(|&&(a, b)| a == f || b == f)
                .count()
        };
        let ci = arr
            .faces()
            .iter()
            .position(|f| std::ptr::eq(f, center))
            .unwrap();
        assert_eq!(deg(ci), 4);
        assert_eq!(arr.neighborhood().len(), 12);
    }

    #[test]
    fn parallel_traits_enclose_nothing() {
        let r = build_arrangement(&hv(&[10.0, 20.0, 30.0], &[]), Rect::from_size(50.0, 50.0));
        assert_eq!(r.unwrap_err(), ArrangementError::NoBoundedFace);
        let r = build_arrangement(&hv(&[10.0], &[]), Rect::from_size(50.0, 50.0));
        assert_eq!(r.unwrap_err(), ArrangementError::TooFewTraits(1));
        let r = build_arrangement(&hv(&[10.0, 200.0], &[300.0]), Rect::from_size(50.0, 50.0));
        assert_eq!(r.unwrap_err(), ArrangementError::TooFewTraits(1));
    }

    #[test]
    fn traits_on_the_frame_collapse_into_frame_edges() {
        let arr = build_arrangement(
            &hv(&[0.0, 25.0, 50.0], &[0.3, 25.0]),
            Rect::from_size(50.0, 50.0),
        )
        .unwrap();
        assert_eq!(arr.faces().len(), 4);
        assert!((arr.total_face_area() - 2500.0).abs() < 1e-9);
        assert_eq!(arr.euler_characteristic(), 2);
        assert_eq!(
            arr.prime()
                .edges()
                .iter()
                .filter(|e| e.host.is_frame())
                .count(),
            8
        );
    }

    #[test]
    fn near_coincident_crossings_merge() {
        // three lines through (almost) one point
        let t = vec![
            Trait::line(0.0, 20.0),
            Trait::line(PI / 2.0, 20.0),
            Line::through(Point2::new(0.0, 0.1), Point2::new(40.0, 40.1))
                .map(Trait::Line)
                .unwrap(),
        ];
        let arr = build_arrangement(&t, Rect::from_size(40.0, 40.0)).unwrap();
        assert_eq!(arr.faces().len(), 6);
        assert!((arr.total_face_area() - 1600.0).abs() < 1e-6);
        assert_eq!(arr.euler_characteristic(), 2);
    }

    #[test]
    fn slivers_are_absorbed() {
        // x = 30 and x = 31 bound a 1 px wide strip cut in two by y = 20
        let arr =
            build_arrangement(&hv(&[30.0, 31.0], &[20.0]), Rect::from_size(60.0, 40.0)).unwrap();
        assert!(arr.faces().iter().all(|f| f.area() >= MIN_FACE_AREA));
        assert!((arr.total_face_area() - 2400.0).abs() < 1e-9);
        assert_eq!(arr.euler_characteristic(), 2);
        // the strip halves are 20 px² each and survive
        assert_eq!(arr.faces().len(), 6);
        let arr = build_arrangement(
            &hv(&[30.0, 30.6], &[20.0, 21.0]),
            Rect::from_size(60.0, 40.0),
        )
        .unwrap();
        assert!(arr.faces().iter().all(|f| f.area() >= MIN_FACE_AREA));
        assert!((arr.total_face_area() - 2400.0).abs() < 1e-9);
    }
}
