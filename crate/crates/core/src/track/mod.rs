//! Reference-path extraction from a digital-twin track image.

mod image;
mod mask;
mod path;
mod thinning;

use thiserror::Error;

pub use self::image::TrackImage;
pub use mask::{binarize, Mask};
pub use path::{resample, trace_path, ReferencePath, ReferencePathFile};
pub use thinning::thin;

use crate::geometry::GeometryError;

pub const DEFAULT_THRESHOLD: u8 = 128;
pub const DEFAULT_RESAMPLE_COUNT: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("no track pixels at threshold {threshold} (track_is_bright = {track_is_bright}); check threshold or polarity")]
    EmptyMask { threshold: u8, track_is_bright: bool },
    #[error("skeleton branches at {} pixel(s), first at {:?}; clean spurs from the track image or raise the threshold", pixels.len(), pixels.first())]
    BranchingSkeleton { pixels: Vec<(u32, u32)> },
    #[error("skeleton has {components} separate pieces; expected one")]
    DisconnectedSkeleton { components: usize },
    #[error("degenerate path: {0}")]
    DegeneratePath(String),
    #[error("resample count {0} must be at least 2")]
    InvalidCount(usize),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("reference path file: {0}")]
    PathFile(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Binarize, thin, trace and resample in one go.
pub fn extract_reference_path(
    image: &TrackImage,
    track_is_bright: bool,
    resample_count: usize,
) -> Result<ReferencePath, TrackError> {
    let mask = binarize(image, track_is_bright)?;
    let skeleton = thin(&mask);
    let traced = trace_path(&skeleton)?;
    resample(&traced, resample_count)
}
