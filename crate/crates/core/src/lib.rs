//! Benchmarking of driven trajectories filmed by a single overhead camera.
//!
//! The pipeline calibrates a camera -> digital-twin homography from
//! hand-picked keypoints, extracts a reference centerline from the twin
//! track image, maps detected robot positions into twin pixels and scores
//! the driven path against the reference (DTW or discrete Fréchet distance,
//! normalized into a percentage) together with lap completion time.

pub mod detection;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod pipeline;
pub mod session;
pub mod track;

pub use geometry::{
    estimate_homography, CalibrationDiagnostics, Frame, GeometryError, Homography, ImageSize,
    KeypointPair, KeypointSet, Point2,
};
pub use detection::{DetectionRecord, Trajectory};
pub use metrics::{BenchmarkScore, MetricKind, PathDistanceResult, SimilarityConfig, StartLine};
pub use track::{ReferencePath, TrackImage};
