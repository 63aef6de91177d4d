//! Line-list maps: one wall segment `x1 y1 x2 y2` per line, in pixels.
//! Blank lines and `#` comments are ignored.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{Line, Point2, Rect, Trait};
use crate::raster::{CellState, OccupancyGrid};

#[derive(Debug, thiserror::Error)]
pub enum VectorError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line list holds no segments")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return p.distance(self.a);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.distance(self.a + d * t)
    }
}

pub fn parse_line_list(text: &str) -> Result<Vec<Segment>, VectorError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| VectorError::Parse {
                line: n + 1,
                message: e.to_string(),
            })?;
        if nums.len() != 4 || nums.iter().any(|v| !v.is_finite()) {
            return Err(VectorError::Parse {
                line: n + 1,
                message: format!("expected 4 finite numbers, got {:?}", line),
            });
        }
        let s = Segment::new(Point2::new(nums[0], nums[1]), Point2::new(nums[2], nums[3]));
        if s.length() == 0.0 {
            return Err(VectorError::Parse {
                line: n + 1,
                message: "segment has zero length".into(),
            });
        }
        out.push(s);
    }
    if out.is_empty() {
        return Err(VectorError::Empty);
    }
    Ok(out)
}

pub fn load_line_list(path: impl AsRef<Path>) -> Result<Vec<Segment>, VectorError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| VectorError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_line_list(&text)
}

/// Supporting lines of the segments, with lines repeated by collinear
/// segments kept once.
pub fn segments_to_traits(segments: &[Segment]) -> Vec<Trait> {
    let mut out: Vec<Line> = Vec::new();
    for s in segments {
        let Some(l) = Line::through(s.a, s.b) else {
            continue;
        };
        let dup = out.iter().any(|o| {
            let dt = (o.theta() - l.theta()).abs();
            (dt < 1e-6 && (o.rho() - l.rho()).abs() < 0.5)
                || ((std::f64::consts::PI - dt).abs() < 1e-6 && (o.rho() + l.rho()).abs() < 0.5)
        });
        if !dup {
            out.push(l);
        }
    }
    out.into_iter().map(Trait::Line).collect()
}

/// Marks every cell whose center lies within `width / 2` of a segment as
/// occupied.
pub fn draw_segments(grid: &mut OccupancyGrid, segments: &[Segment], width: f64) {
    let half = 0.5 * width;
    let o = grid.origin();
    for s in segments {
        let lo = Point2::new(s.a.x.min(s.b.x) - half, s.a.y.min(s.b.y) - half) - o;
        let hi = Point2::new(s.a.x.max(s.b.x) + half, s.a.y.max(s.b.y) + half) - o;
        let x0 = lo.x.floor().max(0.0) as usize;
        let y0 = lo.y.floor().max(0.0) as usize;
        let x1 = (hi.x.ceil().max(0.0) as usize).min(grid.width());
        let y1 = (hi.y.ceil().max(0.0) as usize).min(grid.height());
        for y in y0..y1 {
            for x in x0..x1 {
                if s.distance_to(grid.cell_center(x, y)) <= half {
                    grid.set(x, y, CellState::Occupied);
                }
            }
        }
    }
}

/// Free grid covering the segments' bounding box plus `margin` pixels, with
/// the segments drawn in.
pub fn rasterize_segments(segments: &[Segment], width: f64, margin: usize) -> OccupancyGrid {
    let (mut lo, mut hi) = (segments[0].a, segments[0].a);
    for s in segments {
        for p in [s.a, s.b] {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
    }
    let m = margin as f64 + width;
    let bounds = Rect::new(
        Point2::new((lo.x - m).floor(), (lo.y - m).floor()),
        Point2::new((hi.x + m).ceil(), (hi.y + m).ceil()),
    );
    let mut grid = OccupancyGrid::filled(
        bounds.width() as usize,
        bounds.height() as usize,
        CellState::Free,
    )
    .expect("bounds are at least one margin wide")
    .with_origin(bounds.min);
    draw_segments(&mut grid, segments, width);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let s = parse_line_list("# square\n0 0 10 0\n\n10 0 10 10  # right\n10,10,0,10\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[2].b, Point2::new(0.0, 10.0));
        assert!(matches!(
            parse_line_list("1 2 3\n"),
            Err(VectorError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_line_list("# nothing\n"),
            Err(VectorError::Empty)
        ));
        assert!(matches!(
            parse_line_list("1 1 1 1"),
            Err(VectorError::Parse { .. })
        ));
    }

    #[test]
    fn collinear_segments_share_a_trait() {
        let s = parse_line_list("0 0 4 0\n6 0 10 0\n10 0 10 5\n3 5 0 5\n").unwrap();
        assert_eq!(segments_to_traits(&s).len(), 3);
    }

    #[test]
    fn raster_covers_segments_with_margin() {
        let s = parse_line_list("10 10 30 10\n").unwrap();
        let g = rasterize_segments(&s, 2.0, 5);
        assert!(g.bounds().contains(Point2::new(3.0, 3.0), 0.0));
        let (x, y) = g.cell_at(Point2::new(20.0, 10.2)).unwrap();
        assert!(g.is_occupied(x, y));
        let (x, y) = g.cell_at(Point2::new(20.0, 12.5)).unwrap();
        assert!(!g.is_occupied(x, y));
    }
}
