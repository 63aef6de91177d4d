//! Raster maps: ingestion, normalized distance transform, and straight-line
//! trait detection by gradient-weighted Radon transform ("radiography").

mod distance;
mod grid;
mod radiography;

pub use distance::{distance_map, DistanceMap};
pub use grid::{load_grid, save_grid, CellState, OccupancyGrid};
pub use radiography::{
    detect_line_traits, occupancy_gradient, radiography, RadiographyAccumulator,
};

#[derive(Debug, thiserror::Error)]
pub enum RasterError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("cannot decode image {0}")]
    Decode(String),
    #[error("image has zero area")]
    ZeroArea,
    #[error("expected {expected} cells, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("grid has no occupied cells")]
    NoOccupiedCells,
    #[error("grid has no free cells")]
    NoFreeCells,
    #[error("accumulator is empty")]
    EmptyAccumulator,
    #[error("accumulator bins must be non-negative")]
    NegativeBin,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
