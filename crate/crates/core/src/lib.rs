//! Line segment extraction with a connectivity-enforcing Hough transform.
//!
//! The pipeline runs [`edges`] (signed directional edge maps), [`directions`]
//! (prominent local orientations per edge point), [`length_map`] (per-seed
//! connected-length search over line parameters) and [`extract`] (peaks,
//! endpoints, retirement). [`hough`] is the classical baseline and
//! [`synth`]/[`score`] generate and evaluate synthetic scenes.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod directions;
pub mod edges;
pub mod error;
pub mod extract;
pub mod fit;
pub mod geom;
pub mod hough;
pub mod image;
pub mod length_map;
pub mod nms;
pub mod overlay;
pub mod score;
pub mod synth;

pub use directions::{DirectionEntry, DirectionStore, HistogramParams, ProminentDirectionSet};
pub use edges::{DirectionalEdgeMaps, Orientation};
pub use error::{Error, Result};
pub use extract::{extract_all, ExtractParams, LineSegment};
pub use geom::Pixel;
pub use image::Image;
pub use length_map::{LengthMap, MapParams};
