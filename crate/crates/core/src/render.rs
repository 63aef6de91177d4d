//! PNG renderings for inspection: colored faces over a map, and one map warped
//! onto another.

use std::path::Path;

use image::{Rgb, RgbImage};

use crate::arrangement::Arrangement;
use crate::geometry::{GeometryError, Transform2};
use crate::raster::{CellState, OccupancyGrid};

fn gray(c: CellState) -> Rgb<u8> {
    match c {
        CellState::Occupied => Rgb([0, 0, 0]),
        CellState::Unknown => Rgb([127, 127, 127]),
        CellState::Free => Rgb([255, 255, 255]),
    }
}

fn blend(a: Rgb<u8>, b: Rgb<u8>, alpha: f64) -> Rgb<u8> {
    let mix = |x: u8, y: u8| ((1.0 - alpha) * x as f64 + alpha * y as f64).round() as u8;
    Rgb([mix(a[0], b[0]), mix(a[1], b[1]), mix(a[2], b[2])])
}

/// Distinct, stable color per face index (golden-angle hue walk).
pub fn face_color(i: usize) -> Rgb<u8> {
    let h = (i as f64 * 137.507_764) % 360.0;
    let (s, v) = (0.65, 0.95);
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to = |u: f64| ((u + m) * 255.0).round() as u8;
    Rgb([to(r), to(g), to(b)])
}

/// The grid in gray with every face of `arr` tinted in its own color and the
/// prime graph edges drawn dark red.
pub fn render_faces(grid: &OccupancyGrid, arr: &Arrangement) -> RgbImage {
    let mut img = RgbImage::from_fn(grid.width() as u32, grid.height() as u32, |x, y| {
        gray(grid.get(x as usize, y as usize))
    });
    let o = grid.origin();
    for (i, face) in arr.faces().iter().enumerate() {
        let (lo, hi) = face.polygon().bounds();
        let x0 = ((lo.x - o.x).floor().max(0.0) as usize).min(grid.width());
        let y0 = ((lo.y - o.y).floor().max(0.0) as usize).min(grid.height());
        let x1 = ((hi.x - o.x).ceil().max(0.0) as usize).min(grid.width());
        let y1 = ((hi.y - o.y).ceil().max(0.0) as usize).min(grid.height());
        let color = face_color(i);
        for y in y0..y1 {
            for x in x0..x1 {
                if face.polygon().contains(grid.cell_center(x, y)) {
                    let p = img.get_pixel_mut(x as u32, y as u32);
                    *p = blend(*p, color, 0.5);
                }
            }
        }
    }
    for e in 0..arr.prime().edges().len() {
        let (a, b) = arr.prime().segment(e);
        let steps = (a.distance(b).ceil() as usize * 2).max(1);
        for k in 0..=steps {
            let p = a + (b - a) * (k as f64 / steps as f64);
            if let Some((x, y)) = grid.cell_at(p) {
                img.put_pixel(x as u32, y as u32, Rgb([160, 0, 0]));
            }
        }
    }
    img
}

/// Map 2 in gray with the occupied cells of map 1, carried by `t` (map 1 to
/// map 2), blended in red at half opacity. Nearest-neighbor sampling.
pub fn render_overlay(
    map1: &OccupancyGrid,
    map2: &OccupancyGrid,
    t: &Transform2,
) -> Result<RgbImage, GeometryError> {
    let inv = t.inverse()?;
    Ok(RgbImage::from_fn(
        map2.width() as u32,
        map2.height() as u32,
        |x, y| {
            let base = gray(map2.get(x as usize, y as usize));
            let q = inv.apply(map2.cell_center(x as usize, y as usize));
            match map1.cell_at(q) {
                Some((u, v)) if map1.is_occupied(u, v) => blend(base, Rgb([255, 0, 0]), 0.5),
                _ => base,
            }
        },
    ))
}

pub fn save_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<(), String> {
    let path = path.as_ref();
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}
