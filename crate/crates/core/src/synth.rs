//! Synthetic office-like floor plans with known rooms, for tests and demos.
//!
//! A plan is a grid of rectangular cells with random column widths and row
//! heights. Some neighboring cells are merged into larger rooms, and every
//! wall between two distinct rooms gets one door gap.

use rand::Rng;

use crate::geometry::{Point2, Polygon, Rect, Transform2};
use crate::raster::{CellState, OccupancyGrid};
use crate::vector::{draw_segments, Segment};

#[derive(Debug, Clone, PartialEq)]
pub struct FloorPlanParams {
    pub rows: usize,
    pub cols: usize,
    pub min_size: f64,
    pub max_size: f64,
    pub door_min: f64,
    pub door_max: f64,
    /// Number of neighboring cell pairs merged into one room.
    pub merges: usize,
}

impl Default for FloorPlanParams {
    fn default() -> Self {
        Self {
            rows: 2,
            cols: 3,
            min_size: 40.0,
            max_size: 100.0,
            door_min: 4.0,
            door_max: 10.0,
            merges: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloorPlan {
    /// Rooms as rectangles between wall center lines.
    pub rooms: Vec<Polygon>,
    pub walls: Vec<Segment>,
    pub bounds: Rect,
}

impl FloorPlan {
    pub fn transformed(&self, t: &Transform2) -> FloorPlan {
        let rooms = self
            .rooms
            .iter()
            .map(|r| r.transformed(t).expect("similarity keeps rooms valid"))
            .collect();
        let walls = self
            .walls
            .iter()
            .map(|s| Segment::new(t.apply(s.a), t.apply(s.b)))
            .collect();
        let corners = self.bounds.corners().map(|c| t.apply(c));
        let lo = corners
            .iter()
            .fold(corners[0], |a, c| Point2::new(a.x.min(c.x), a.y.min(c.y)));
        let hi = corners
            .iter()
            .fold(corners[0], |a, c| Point2::new(a.x.max(c.x), a.y.max(c.y)));
        FloorPlan {
            rooms,
            walls,
            bounds: Rect::new(lo, hi),
        }
    }
}

/// Random plan with its lower-left building corner at the origin.
pub fn generate_floor_plan(rng: &mut impl Rng, p: &FloorPlanParams) -> FloorPlan {
    let widths: Vec<f64> = (0..p.cols)
        .map(|_| rng.gen_range(p.min_size..=p.max_size).round())
        .collect();
    let heights: Vec<f64> = (0..p.rows)
        .map(|_| rng.gen_range(p.min_size..=p.max_size).round())
        .collect();
    let xs: Vec<f64> = std::iter::once(0.0)
        .chain(widths.iter().scan(0.0, |s, w| {
            *s += w;
            Some(*s)
        }))
        .collect();
    let ys: Vec<f64> = std::iter::once(0.0)
        .chain(heights.iter().scan(0.0, |s, h| {
            *s += h;
            Some(*s)
        }))
        .collect();

    // room id per cell; merges join a cell with its right or lower neighbor
    let cell = |r: usize, c: usize| r * p.cols + c;
    let mut room: Vec<usize> = (0..p.rows * p.cols).collect();
    let mut merged = vec![false; p.rows * p.cols];
    let mut done = 0;
    for _ in 0..200 {
        if done == p.merges {
            break;
        }
        let (r, c) = (rng.gen_range(0..p.rows), rng.gen_range(0..p.cols));
        let horizontal = rng.gen_bool(0.5);
        let (r2, c2) = if horizontal { (r, c + 1) } else { (r + 1, c) };
        if r2 >= p.rows || c2 >= p.cols || merged[cell(r, c)] || merged[cell(r2, c2)] {
            continue;
        }
        merged[cell(r, c)] = true;
        merged[cell(r2, c2)] = true;
        room[cell(r2, c2)] = room[cell(r, c)];
        done += 1;
    }

    let mut ids: Vec<usize> = room.clone();
    ids.sort_unstable();
    ids.dedup();
    let rooms = ids
        .iter()
        .map(|&id| {
            let cells: Vec<(usize, usize)> = (0..p.rows)
                .flat_map(|r| (0..p.cols).map(move |c| (r, c)))
                .filter(|&(r, c)| room[cell(r, c)] == id)
                .collect();
            let r0 = cells.iter().map(|c| c.0).min().unwrap();
            let r1 = cells.iter().map(|c| c.0).max().unwrap() + 1;
            let c0 = cells.iter().map(|c| c.1).min().unwrap();
            let c1 = cells.iter().map(|c| c.1).max().unwrap() + 1;
            Polygon::new(vec![
                Point2::new(xs[c0], ys[r0]),
                Point2::new(xs[c1], ys[r0]),
                Point2::new(xs[c1], ys[r1]),
                Point2::new(xs[c0], ys[r1]),
            ])
            .unwrap()
        })
        .collect();

    let (w, h) = (xs[p.cols], ys[p.rows]);
    let mut walls = vec![
        Segment::new(Point2::new(0.0, 0.0), Point2::new(w, 0.0)),
        Segment::new(Point2::new(w, 0.0), Point2::new(w, h)),
        Segment::new(Point2::new(w, h), Point2::new(0.0, h)),
        Segment::new(Point2::new(0.0, h), Point2::new(0.0, 0.0)),
    ];
    let mut with_door = |a: Point2, b: Point2, rng: &mut dyn rand::RngCore| {
        let len = a.distance(b);
        let door = rng.gen_range(p.door_min..=p.door_max).round();
        let start = rng.gen_range(8.0..(len - 8.0 - door).max(8.5)).round();
        let d = (b - a) * (1.0 / len);
        walls.push(Segment::new(a, a + d * start));
        walls.push(Segment::new(a + d * (start + door), b));
    };
    for r in 0..p.rows {
        for c in 0..p.cols {
            if c + 1 < p.cols && room[cell(r, c)] != room[cell(r, c + 1)] {
                with_door(
                    Point2::new(xs[c + 1], ys[r]),
                    Point2::new(xs[c + 1], ys[r + 1]),
                    rng,
                );
            }
            if r + 1 < p.rows && room[cell(r, c)] != room[cell(r + 1, c)] {
                with_door(
                    Point2::new(xs[c], ys[r + 1]),
                    Point2::new(xs[c + 1], ys[r + 1]),
                    rng,
                );
            }
        }
    }

    FloorPlan {
        rooms,
        walls,
        bounds: Rect::new(Point2::new(0.0, 0.0), Point2::new(w, h)),
    }
}

/// Free raster covering `canvas` (whose corner becomes the grid origin) with
/// the plan's walls drawn `wall_width` pixels thick.
pub fn render_plan(plan: &FloorPlan, canvas: Rect, wall_width: f64) -> OccupancyGrid {
    let mut grid = OccupancyGrid::filled(
        canvas.width().ceil() as usize,
        canvas.height().ceil() as usize,
        CellState::Free,
    )
    .expect("non-empty raster")
    .with_origin(canvas.min);
    draw_segments(&mut grid, &plan.walls, wall_width);
    grid
}

impl FloorPlan {
    /// Integer-aligned rectangle holding the plan with `margin` pixels to
    /// spare on every side.
    pub fn canvas(&self, margin: f64) -> Rect {
        Rect::new(
            Point2::new(
                (self.bounds.min.x - margin).floor(),
                (self.bounds.min.y - margin).floor(),
            ),
            Point2::new(
                (self.bounds.max.x + margin).ceil(),
                (self.bounds.max.y + margin).ceil(),
            ),
        )
    }
}

/// Flips every occupied/free cell with probability `rate`.
pub fn add_flip_noise(grid: &mut OccupancyGrid, rate: f64, rng: &mut impl Rng) {
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            if rng.gen_bool(rate) {
                let flipped = match grid.get(x, y) {
                    CellState::Occupied => CellState::Free,
                    CellState::Free => CellState::Occupied,
                    CellState::Unknown => CellState::Unknown,
                };
                grid.set(x, y, flipped);
            }
        }
    }
}
