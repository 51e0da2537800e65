//! Camera -> twin calibration: keypoints, homography estimation and
//! reprojection diagnostics.

mod diagnostics;
mod homography;
mod keypoints;
mod point;

use thiserror::Error;

pub use diagnostics::{
    keypoint_error_curve, leave_one_out, reprojection_diagnostics, CalibrationDiagnostics,
    ErrorCurvePoint,
};
pub use homography::{
    apply_homography, estimate_homography, Homography, MAX_CONDITION, MIN_DETERMINANT, MIN_SCALE,
};
pub use keypoints::{ImageSize, KeypointFile, KeypointFilePair, KeypointPair, KeypointSet};
pub use point::{ensure_frame, Frame, Point2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinates ({x}, {y}) are not finite")]
    NonFinite { x: f64, y: f64 },
    #[error("expected a {expected}-frame point, got {found}")]
    FrameMismatch { expected: Frame, found: Frame },
    #[error("need at least {required} keypoint pairs, have {found}")]
    TooFewPoints { required: usize, found: usize },
    #[error("degenerate keypoint configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("point ({x}, {y}) maps to infinity")]
    PointAtInfinity { x: f64, y: f64 },
    #[error("pair {index}: {frame} point ({x}, {y}) is outside the image")]
    OutOfBounds {
        index: usize,
        frame: Frame,
        x: f64,
        y: f64,
    },
    #[error("pair {second} repeats the camera point of pair {first}")]
    DuplicateCameraPoint { first: usize, second: usize },
    #[error("index {index} out of range for {len} pairs")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("image size {width}x{height} must be positive")]
    InvalidImageSize { width: u32, height: u32 },
    #[error("keypoints file: {0}")]
    KeypointFile(String),
}
