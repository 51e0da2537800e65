//! Trajectory scoring: warping distances, the percentage similarity score,
//! start-line lap timing and failure events.

mod distance;
mod laps;
mod offtrack;
mod trial;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use distance::{dtw_distance, frechet_distance, path_distance};
pub use laps::{completion_time, detect_crossings, Completion, Crossing, CrossingDirection, StartLine};
pub use offtrack::{off_track_events, point_segment_distance};
pub use trial::{score_trajectory, BenchmarkScore, ReferenceDirection, ScoringConfig};

use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("distance needs two non-empty sequences")]
    EmptySequence,
    #[error("{0}")]
    InvalidConfig(String),
    #[error("trajectory has {0} samples, at least 2 are required")]
    TooFewSamples(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Dtw,
    Frechet,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MetricKind::Dtw => "dtw",
            MetricKind::Frechet => "frechet",
        })
    }
}

impl std::str::FromStr for MetricKind {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dtw" => Ok(MetricKind::Dtw),
            "frechet" => Ok(MetricKind::Frechet),
            other => Err(MetricsError::InvalidConfig(format!(
                "unknown metric `{other}`, expected dtw or frechet"
            ))),
        }
    }
}

/// Metric choice, optional per-step clamp and the baseline that maps a
/// distance to 0 %. Both lengths are in twin pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    pub metric: MetricKind,
    pub clamp_delta: Option<f64>,
    pub baseline: f64,
}

impl SimilarityConfig {
    pub fn new(metric: MetricKind, clamp_delta: Option<f64>, baseline: f64) -> Result<Self, MetricsError> {
        if !(baseline.is_finite() && baseline > 0.0) {
            return Err(MetricsError::InvalidConfig(format!(
                "baseline must be positive, got {baseline}"
            )));
        }
        if let Some(d) = clamp_delta {
            if !(d.is_finite() && d > 0.0) {
                return Err(MetricsError::InvalidConfig(format!(
                    "clamp delta must be positive, got {d}"
                )));
            }
        }
        Ok(Self {
            metric,
            clamp_delta,
            baseline,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathDistanceResult {
    pub distance: f64,
    pub metric: MetricKind,
    pub clamped: bool,
}

/// `min(100, 100 * max(0, 1 - d / B))`.
pub fn similarity_score(d: &PathDistanceResult, config: &SimilarityConfig) -> f64 {
    similarity_percent(d.distance, config.baseline)
}

pub fn similarity_percent(distance: f64, baseline: f64) -> f64 {
    (100.0 * (1.0 - distance / baseline).max(0.0)).min(100.0)
}

/// Suggested baseline: a tenth of the reference arc length.
pub fn suggest_baseline(arc_length: f64) -> f64 {
    0.10 * arc_length
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    OffTrack,
    DidNotFinish,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureEvent {
    pub time: f64,
    pub kind: FailureKind,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
}
