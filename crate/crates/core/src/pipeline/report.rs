use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::geometry::{CalibrationDiagnostics, Homography};
use crate::metrics::{BenchmarkScore, FailureEvent, MetricKind, ReferenceDirection};

/// Top-level keys of a report, in serialization order.
pub const REPORT_KEYS: [&str; 6] = ["config", "calibration", "score", "trajectory_stats", "version", "timestamp"];

pub const SCORE_KEYS: [&str; 11] = [
    "path_similarity_percent",
    "completion_seconds",
    "metric",
    "distance_px",
    "clamped",
    "reference_direction",
    "crossings",
    "scored_samples",
    "reference_samples",
    "failure_events",
    "baseline_px",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    /// Parsed settings with defaults filled in.
    pub settings: Value,
    /// Content hashes keyed by config key.
    pub files: BTreeMap<String, FileHash>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBlock {
    pub homography: Homography,
    /// Reprojection of every keypoint through the fit on all keypoints.
    pub diagnostics: CalibrationDiagnostics,
    /// Each keypoint scored against a fit on the others (5+ keypoints).
    pub leave_one_out: Option<CalibrationDiagnostics>,
    pub max_average_error_px: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBlock {
    pub path_similarity_percent: f64,
    pub completion_seconds: Option<f64>,
    pub metric: MetricKind,
    pub distance_px: f64,
    pub clamped: bool,
    pub reference_direction: ReferenceDirection,
    pub crossings: usize,
    pub scored_samples: usize,
    pub reference_samples: usize,
    pub failure_events: Vec<FailureEvent>,
    pub baseline_px: f64,
}

impl ScoreBlock {
    pub fn new(score: &BenchmarkScore, baseline_px: f64) -> Self {
        Self {
            path_similarity_percent: score.similarity_percent,
            completion_seconds: score.completion_seconds,
            metric: score.distance.metric,
            distance_px: score.distance.distance,
            clamped: score.distance.clamped,
            reference_direction: score.reference_direction,
            crossings: score.crossings,
            scored_samples: score.scored_samples,
            reference_samples: score.reference_samples,
            failure_events: score.failure_events.clone(),
            baseline_px,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub sample_count: usize,
    pub gap_count: usize,
    pub gap_frames: u64,
    pub first_frame: u64,
    pub last_frame: u64,
    pub duration_seconds: f64,
    pub fps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkReport {
    pub config: ConfigEcho,
    pub calibration: CalibrationBlock,
    pub score: ScoreBlock,
    pub trajectory_stats: TrajectoryStats,
    pub version: String,
    pub timestamp: String,
}

impl BenchmarkReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable") + "\n"
    }

    pub fn from_json_str(text: &str) -> Result<Self, String> {
        let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        validate_report_value(&value)?;
        serde_json::from_value(value).map_err(|e| e.to_string())
    }
}

/// Checks the documented top-level and score key sets exactly.
pub fn validate_report_value(value: &Value) -> Result<(), String> {
    let exact = |v: &Value, keys: &[&str], what: &str| -> Result<(), String> {
        let obj = v.as_object().ok_or_else(|| format!("{what} is not an object"))?;
        for k in keys {
            if !obj.contains_key(*k) {
                return Err(format!("{what} lacks `{k}`"));
            }
        }
        if let Some(extra) = obj.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(format!("{what} has unexpected `{extra}`"));
        }
        Ok(())
    };
    exact(value, &REPORT_KEYS, "report")?;
    exact(&value["score"], &SCORE_KEYS, "score")?;
    let percent = value["score"]["path_similarity_percent"]
        .as_f64()
        .ok_or("path_similarity_percent is not a number")?;
    if !(0.0..=100.0).contains(&percent) {
        return Err(format!("path_similarity_percent {percent} outside [0, 100]"));
    }
    match &value["score"]["completion_seconds"] {
        Value::Null => {}
        v if v.as_f64().is_some_and(|s| s >= 0.0) => {}
        other => return Err(format!("completion_seconds {other} is neither null nor >= 0")),
    }
    if !value["timestamp"].is_string() || !value["version"].is_string() {
        return Err("version and timestamp must be strings".into());
    }
    Ok(())
}

/// Report text with the timestamp blanked, for determinism checks.
pub fn without_timestamp(report_json: &str) -> Result<String, String> {
    let mut v: Value = serde_json::from_str(report_json).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("report is not an object")?.remove("timestamp");
    Ok(serde_json::to_string(&v).expect("serializable"))
}
