#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alignment;
pub mod arrangement;
pub mod config;
pub mod geometry;
pub mod pipeline;
pub mod raster;
pub mod render;
pub mod scoring;
pub mod synth;
pub mod vector;
