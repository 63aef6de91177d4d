use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RasterError;
use crate::geometry::{Point2, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Occupied,
    Free,
    Unknown,
}

/// Raster map. Cell `(x, y)` covers the world square
/// `origin + [x, x+1) × [y, y+1)`; x grows right, y grows down.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    cells: Vec<CellState>,
    origin: Point2,
    resolution: f64,
}

impl OccupancyGrid {
    pub fn new(width: usize, height: usize, cells: Vec<CellState>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroArea);
        }
        if cells.len() != width * height {
            return Err(RasterError::SizeMismatch {
                expected: width * height,
                got: cells.len(),
            });
        }
        Ok(Self {
            width,
            height,
            cells,
            origin: Point2::default(),
            resolution: 1.0,
        })
    }

    pub fn filled(width: usize, height: usize, state: CellState) -> Result<Self, RasterError> {
        Self::new(width, height, vec![state; width * height])
    }

    /// Classifies 8-bit gray levels: below `occupied_threshold` is occupied,
    /// above `255 - occupied_threshold` is free, the band between is unknown.
    pub fn from_gray(
        width: usize,
        height: usize,
        gray: &[u8],
        occupied_threshold: u8,
    ) -> Result<Self, RasterError> {
        let free_above = 255 - occupied_threshold;
        let cells = gray
            .iter()
            .map(|&g| {
                if g < occupied_threshold {
                    CellState::Occupied
                } else if g > free_above {
                    CellState::Free
                } else {
                    CellState::Unknown
                }
            })
            .collect();
        Self::new(width, height, cells)
    }

    pub fn with_origin(mut self, origin: Point2) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_resolution(mut self, meters_per_pixel: f64) -> Self {
        self.resolution = meters_per_pixel;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> CellState {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, state: CellState) {
        self.cells[y * self.width + x] = state;
    }

    pub fn is_occupied(&self, x: usize, y: usize) -> bool {
        self.get(x, y) == CellState::Occupied
    }

    pub fn occupied_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|&&c| c == CellState::Occupied)
            .count()
    }

    /// World rectangle covered by the raster.
    pub fn bounds(&self) -> Rect {
        Rect::new(
            self.origin,
            self.origin + Point2::new(self.width as f64, self.height as f64),
        )
    }

    /// World position of the center of cell `(x, y)`.
    pub fn cell_center(&self, x: usize, y: usize) -> Point2 {
        self.origin + Point2::new(x as f64 + 0.5, y as f64 + 0.5)
    }

    /// Cell containing world point `p`, if inside the raster.
    pub fn cell_at(&self, p: Point2) -> Option<(usize, usize)> {
        let q = p - self.origin;
        if q.x < 0.0 || q.y < 0.0 {
            return None;
        }
        let (x, y) = (q.x.floor() as usize, q.y.floor() as usize);
        (x < self.width && y < self.height).then_some((x, y))
    }

    /// Copy surrounded by `margin` cells of `fill`; the world position of the
    /// original cells is unchanged.
    pub fn padded(&self, margin: usize, fill: CellState) -> Self {
        let w = self.width + 2 * margin;
        let h = self.height + 2 * margin;
        let mut cells = vec![fill; w * h];
        for y in 0..self.height {
            let src = &self.cells[y * self.width..(y + 1) * self.width];
            let start = (y + margin) * w + margin;
            cells[start..start + self.width].copy_from_slice(src);
        }
        Self {
            width: w,
            height: h,
            cells,
            origin: self.origin - Point2::new(margin as f64, margin as f64),
            resolution: self.resolution,
        }
    }

    /// Copy with every 8-connected occupied component of at most
    /// `max_pixels` cells turned free. `max_pixels = 0` is a no-op.
    pub fn despeckled(&self, max_pixels: usize) -> Self {
        let mut out = self.clone();
        if max_pixels == 0 {
            return out;
        }
        let (w, h) = (self.width, self.height);
        let mut seen = vec![false; w * h];
        let mut stack = Vec::new();
        let mut component = Vec::new();
        for start in 0..w * h {
            if seen[start] || self.cells[start] != CellState::Occupied {
                continue;
            }
            component.clear();
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                component.push(i);
                let (x, y) = ((i % w) as isize, (i / w) as isize);
                for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let j = ny as usize * w + nx as usize;
                        if !seen[j] && self.cells[j] == CellState::Occupied {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
            if component.len() <= max_pixels {
                for &i in &component {
                    out.cells[i] = CellState::Free;
                }
            }
        }
        out
    }

    /// 8-bit rendering: occupied 0, unknown 127, free 255.
    pub fn to_gray(&self) -> Vec<u8> {
        self.cells
            .iter()
            .map(|c| match c {
                CellState::Occupied => 0,
                CellState::Unknown => 127,
                CellState::Free => 255,
            })
            .collect()
    }
}

/// Reads a binary portable graymap or a portable network graphics file.
/// Color input is converted to luma.
pub fn load_grid(
    path: impl AsRef<Path>,
    occupied_threshold: u8,
) -> Result<OccupancyGrid, RasterError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| RasterError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let format = image::guess_format(&bytes)
        .map_err(|_| RasterError::UnsupportedFormat(path.display().to_string()))?;
    if !matches!(format, image::ImageFormat::Png | image::ImageFormat::Pnm) {
        return Err(RasterError::UnsupportedFormat(path.display().to_string()));
    }
    let img = image::load_from_memory_with_format(&bytes, format)
        .map_err(|e| RasterError::Decode(format!("{}: {e}", path.display())))?
        .to_luma8();
    let (w, h) = img.dimensions();
    if w == 0 || h == 0 {
        return Err(RasterError::ZeroArea);
    }
    OccupancyGrid::from_gray(w as usize, h as usize, img.as_raw(), occupied_threshold)
}

/// Writes the grid as an 8-bit grayscale image; the format follows the extension.
pub fn save_grid(grid: &OccupancyGrid, path: impl AsRef<Path>) -> Result<(), RasterError> {
    let path = path.as_ref();
    let img = image::GrayImage::from_raw(grid.width() as u32, grid.height() as u32, grid.to_gray())
        .expect("buffer matches dimensions");
    img.save(path)
        .map_err(|e| RasterError::Decode(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use CellState::*;

    #[test]
    fn threshold_classification() {
        let g = OccupancyGrid::from_gray(2, 2, &[0, 255, 255, 0], 127).unwrap();
        assert_eq!(g.cells(), &[Occupied, Free, Free, Occupied]);
        let g = OccupancyGrid::from_gray(1, 1, &[127], 127).unwrap();
        assert_eq!(g.cells(), &[Unknown]);
        let g = OccupancyGrid::from_gray(100, 100, &[255; 10_000], 127).unwrap();
        assert!(g.cells().iter().all(|&c| c == Free));
    }

    #[test]
    fn zero_area_rejected() {
        assert!(matches!(
            OccupancyGrid::new(0, 3, vec![]),
            Err(RasterError::ZeroArea)
        ));
    }

    #[test]
    fn roundtrip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let g = OccupancyGrid::from_gray(3, 2, &[0, 127, 255, 255, 0, 127], 100).unwrap();
        for name in ["m.png", "m.pgm"] {
            let p = dir.path().join(name);
            save_grid(&g, &p).unwrap();
            assert_eq!(load_grid(&p, 100).unwrap(), g);
        }
    }

    #[test]
    fn load_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_grid(dir.path().join("missing.png"), 100),
            Err(RasterError::Io { .. })
        ));
        let p = dir.path().join("lines.txt");
        std::fs::write(&p, "0 0 1 1\n").unwrap();
        assert!(matches!(
            load_grid(&p, 100),
            Err(RasterError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn padding_keeps_world_positions() {
        let mut g = OccupancyGrid::filled(4, 3, Free).unwrap();
        g.set(1, 2, Occupied);
        let p = g.padded(5, Free);
        assert_eq!((p.width(), p.height()), (14, 13));
        let c = g.cell_center(1, 2);
        let (x, y) = p.cell_at(c).unwrap();
        assert!(p.is_occupied(x, y));
        assert_eq!(p.occupied_count(), 1);
    }

    #[test]
    fn despeckle_removes_small_components_only() {
        let mut g = OccupancyGrid::filled(10, 10, Free).unwrap();
        g.set(1, 1, Occupied);
        g.set(2, 2, Occupied); // diagonal neighbor, same component
        for x in 0..10 {
            g.set(x, 7, Occupied);
        }
        let d = g.despeckled(2);
        assert!(!d.is_occupied(1, 1) && !d.is_occupied(2, 2));
        assert_eq!(d.occupied_count(), 10);
        assert_eq!(g.despeckled(0), g);
    }
}
