mod common;

use std::f64::consts::PI;

use mapalign::arrangement::{build_arrangement, edge_value, prune, Arrangement};
use mapalign::geometry::{Point2, Rect, Trait};
use mapalign::raster::{distance_map, CellState, DistanceMap, OccupancyGrid};
use mapalign::vector::{draw_segments, Segment};
use proptest::prelude::*;
use rand::SeedableRng;

const FRAME: Rect = Rect {
    min: Point2 { x: 0.0, y: 0.0 },
    max: Point2 { x: 120.0, y: 90.0 },
};

fn lines(seed: u64, n: usize) -> Vec<Trait> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    loop {
        if let Some(t) = common::random_lines(&mut rng, FRAME, n) {
            return t;
        }
    }
}

/// Axis-aligned walls with gaps drawn into a raster, and the wall lines plus
/// a few stray lines as traits.
fn walled(seed: u64) -> (Vec<Trait>, DistanceMap) {
    use rand::Rng;
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut grid = OccupancyGrid::filled(120, 90, CellState::Free).unwrap();
    let mut segs = vec![
        Segment::new(Point2::new(10.0, 10.0), Point2::new(110.0, 10.0)),
        Segment::new(Point2::new(110.0, 10.0), Point2::new(110.0, 80.0)),
        Segment::new(Point2::new(110.0, 80.0), Point2::new(10.0, 80.0)),
        Segment::new(Point2::new(10.0, 80.0), Point2::new(10.0, 10.0)),
    ];
    let x = rng.gen_range(35.0..85.0f64).round();
    let gap = rng.gen_range(20.0..60.0f64).round();
    segs.push(Segment::new(Point2::new(x, 10.0), Point2::new(x, gap)));
    segs.push(Segment::new(
        Point2::new(x, gap + 8.0),
        Point2::new(x, 80.0),
    ));
    draw_segments(&mut grid, &segs, 3.0);
    let mut traits = vec![
        Trait::line(PI / 2.0, 10.0),
        Trait::line(PI / 2.0, 80.0),
        Trait::line(0.0, 10.0),
        Trait::line(0.0, 110.0),
        Trait::line(0.0, x),
    ];
    for _ in 0..rng.gen_range(0..3) {
        traits.push(Trait::line(
            rng.gen_range(0.1..3.0),
            rng.gen_range(20.0..70.0),
        ));
    }
    (traits, distance_map(&grid).unwrap())
}

fn areas(a: &Arrangement) -> f64 {
    a.faces().iter().map(|f| f.area()).sum()
}

#[test]
fn nine_cells_match_the_oracle() {
    let traits = vec![
        Trait::line(0.0, 30.0),
        Trait::line(0.0, 60.0),
        Trait::line(PI / 2.0, 25.0),
        Trait::line(PI / 2.0, 50.0),
    ];
    let arr = build_arrangement(&traits, FRAME).unwrap();
    let oracle = common::sampled_faces(&traits, FRAME, 0.5);
    assert_eq!(arr.faces().len(), 9);
    assert_eq!(oracle.len(), 9);
    for f in arr.faces() {
        let key = common::sign_key(&traits, f.centroid());
        assert!((oracle[&key] - f.area()).abs() < 1e-9 * f.area().max(1.0) + 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_and_tiling(seed in any::<u64>(), n in 2usize..=8) {
        let traits = lines(seed, n);
        let arr = match build_arrangement(&traits, FRAME) {
            Ok(a) => a,
            Err(_) => return Ok(()),
        };
        prop_assert_eq!(arr.euler_characteristic(), 2);
        prop_assert!((areas(&arr) - FRAME.area()).abs() < 1e-6 * FRAME.area());
        for &(i, j) in arr.neighborhood() {
            prop_assert!(i < j);
        }
        for f in arr.faces() {
            prop_assert!(f.area() > 0.0);
            prop_assert!(f.polygon().contains(f.centroid()));
        }
    }

    #[test]
    fn pruning_invariants(seed in any::<u64>(), thr in 0.02f64..0.3) {
        let (traits, dmap) = walled(seed);
        let arr = build_arrangement(&traits, FRAME).unwrap();
        let (p, report) = prune(&arr, &dmap, thr, 3.0).unwrap();
        prop_assert!(p.faces().len() <= arr.faces().len());
        prop_assert!((areas(&p) - areas(&arr)).abs() < 1e-6 * areas(&arr));
        prop_assert_eq!(p.euler_characteristic(), 2);
        for &e in &report.removed {
            prop_assert!(report.edge_values[e].is_none_or(|v| v >= thr));
        }
        // edges that still separate two faces are walls or gateways
        for e in 0..p.prime().edges().len() {
            let edge = p.prime().edges()[e];
            if edge.host.is_frame() {
                continue;
            }
            if let (Some(a), Some(b)) = p.edge_faces(e) {
                if a != b {
                    let (s, t) = p.prime().segment(e);
                    let v = edge_value(&dmap, s, t, 3.0);
                    prop_assert!(v.is_some_and(|v| v < thr), "edge {} V {:?}", e, v);
                }
            }
        }
        let (again, _) = prune(&p, &dmap, thr, 3.0).unwrap();
        prop_assert_eq!(again.faces().len(), p.faces().len());
        let mut a1: Vec<f64> = p.faces().iter().map(|f| f.area()).collect();
        let mut a2: Vec<f64> = again.faces().iter().map(|f| f.area()).collect();
        a1.sort_by(f64::total_cmp);
        a2.sort_by(f64::total_cmp);
        for (x, y) in a1.iter().zip(&a2) {
            prop_assert!((x - y).abs() < 1e-6 * x.max(1.0));
        }
    }

    #[test]
    fn translation_moves_every_face(seed in any::<u64>(), n in 2usize..=6, dx in -30.0f64..30.0, dy in -30.0f64..30.0) {
        let traits = lines(seed, n);
        let Ok(arr) = build_arrangement(&traits, FRAME) else { return Ok(()) };
        let d = Point2::new(dx, dy);
        let moved: Vec<Trait> = traits
            .iter()
            .map(|t| {
                let l = t.as_line();
                Trait::line(l.theta(), l.rho() + l.normal().dot(d))
            })
            .collect();
        let frame2 = Rect::new(FRAME.min + d, FRAME.max + d);
        let arr2 = build_arrangement(&moved, frame2).unwrap();
        prop_assert_eq!(arr.faces().len(), arr2.faces().len());
        let mut c1: Vec<(i64, i64)> = arr.faces().iter().map(|f| {
            let c = f.centroid() + d;
            ((c.x * 1e3).round() as i64, (c.y * 1e3).round() as i64)
        }).collect();
        let mut c2: Vec<(i64, i64)> = arr2.faces().iter().map(|f| {
            let c = f.centroid();
            ((c.x * 1e3).round() as i64, (c.y * 1e3).round() as i64)
        }).collect();
        c1.sort();
        c2.sort();
        for (a, b) in c1.iter().zip(&c2) {
            prop_assert!((a.0 - b.0).abs() <= 2 && (a.1 - b.1).abs() <= 2);
        }
    }
}
