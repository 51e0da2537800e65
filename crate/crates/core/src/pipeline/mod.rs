//! End-to-end trial evaluation from a config file: reference path,
//! calibration, detections, transform, scoring, report and overlay.

mod config;
mod overlay;
mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{
    BenchmarkConfig, CalibrationSection, ConfigError, ConfigPath, DetectionSource, DetectionsSection, MetricSection,
    StartLineSection, TrackSection,
};
pub use overlay::{render_overlay, OverlayInputs};
pub use report::{
    validate_report_value, without_timestamp, BenchmarkReport, CalibrationBlock, ConfigEcho, FileHash, ScoreBlock,
    TrajectoryStats, REPORT_KEYS, SCORE_KEYS,
};

use crate::detection::{
    build_trajectory, parse_detections_str, run_external_detector, smooth_trajectory, transform_trajectory,
    DetectionError, DetectionRecord, Trajectory,
};
use crate::geometry::{
    estimate_homography, leave_one_out, reprojection_diagnostics, CalibrationDiagnostics, GeometryError,
    Homography, KeypointSet, Point2,
};
use crate::metrics::{score_trajectory, BenchmarkScore, MetricsError, ScoringConfig, SimilarityConfig, StartLine};
use crate::track::{extract_reference_path, ReferencePath, TrackError, TrackImage};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Track,
    Calibration,
    Detection,
    Transform,
    Metrics,
    Output,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Track => "track",
            Stage::Calibration => "calibration",
            Stage::Detection => "detection",
            Stage::Transform => "transform",
            Stage::Metrics => "metrics",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("[config] {0}")]
    Config(#[from] ConfigError),
    #[error("[track] {0}")]
    Track(TrackError),
    #[error("[calibration] {0}")]
    Calibration(GeometryError),
    #[error("[calibration] average reprojection error {average_error:.4} px exceeds the {max_average_error_px} px gate; refine or add keypoints")]
    CalibrationGate {
        average_error: f64,
        max_average_error_px: f64,
    },
    #[error("[detection] {0}")]
    Detection(DetectionError),
    #[error("[transform] {0}")]
    Transform(DetectionError),
    #[error("[metrics] {0}")]
    Metrics(MetricsError),
    #[error("[output] {0}")]
    Output(String),
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Config(_) => Stage::Config,
            PipelineError::Track(_) => Stage::Track,
            PipelineError::Calibration(_) | PipelineError::CalibrationGate { .. } => Stage::Calibration,
            PipelineError::Detection(_) => Stage::Detection,
            PipelineError::Transform(_) => Stage::Transform,
            PipelineError::Metrics(_) => Stage::Metrics,
            PipelineError::Output(_) => Stage::Output,
        }
    }

    /// 2 config, 3 calibration gate, 4 any other data error.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::CalibrationGate { .. } => 3,
            _ => 4,
        }
    }
}

/// Everything needed to score one trial, already loaded.
#[derive(Debug, Clone)]
pub struct TrialInputs {
    pub reference: ReferencePath,
    pub keypoints: KeypointSet,
    pub detections: Vec<DetectionRecord>,
    pub fps: f64,
    pub min_confidence: f64,
    pub smoothing_window: usize,
    pub scoring: ScoringConfig,
    pub max_average_error_px: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub homography: Homography,
    pub diagnostics: CalibrationDiagnostics,
    pub leave_one_out: Option<CalibrationDiagnostics>,
    pub camera_trajectory: Trajectory,
    pub twin_trajectory: Trajectory,
    pub score: BenchmarkScore,
}

/// Calibrates, applies the gate, maps detections into the twin and scores.
pub fn evaluate(inputs: &TrialInputs) -> Result<Evaluation, PipelineError> {
    let homography = estimate_homography(&inputs.keypoints).map_err(PipelineError::Calibration)?;
    let diagnostics = reprojection_diagnostics(&homography, &inputs.keypoints).map_err(PipelineError::Calibration)?;
    let leave_one_out = if inputs.keypoints.len() >= 5 {
        Some(leave_one_out(&inputs.keypoints).map_err(PipelineError::Calibration)?)
    } else {
        None
    };
    if let Some(max) = inputs.max_average_error_px {
        if diagnostics.average_error > max {
            return Err(PipelineError::CalibrationGate {
                average_error: diagnostics.average_error,
                max_average_error_px: max,
            });
        }
    }

    let camera_trajectory = build_trajectory(&inputs.detections, inputs.fps, inputs.min_confidence)
        .map_err(PipelineError::Detection)?;
    let mapped = transform_trajectory(&camera_trajectory, &homography).map_err(PipelineError::Transform)?;
    let twin_trajectory = smooth_trajectory(&mapped, inputs.smoothing_window).map_err(PipelineError::Transform)?;
    let score = score_trajectory(&twin_trajectory, &inputs.reference, &inputs.scoring).map_err(PipelineError::Metrics)?;
    Ok(Evaluation {
        homography,
        diagnostics,
        leave_one_out,
        camera_trajectory,
        twin_trajectory,
        score,
    })
}

/// A finished run: the report plus the overlay, not yet written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: BenchmarkReport,
    pub overlay_svg: String,
    pub output_dir: PathBuf,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn hash_file(key: &str, path: &ConfigPath, files: &mut BTreeMap<String, FileHash>) -> Result<Vec<u8>, ConfigError> {
    let bytes = fs::read(&path.resolved).map_err(|e| ConfigError::Read {
        path: path.resolved.display().to_string(),
        reason: e.to_string(),
    })?;
    files.insert(
        key.to_string(),
        FileHash {
            path: path.raw.clone(),
            sha256: sha256_hex(&bytes),
        },
    );
    Ok(bytes)
}

fn twin_point(key: &str, xy: [f64; 2]) -> Result<Point2, ConfigError> {
    Point2::twin(xy[0], xy[1]).map_err(|e| ConfigError::InvalidValue {
        key: key.into(),
        reason: e.to_string(),
    })
}

/// Runs every stage for `config`. Nothing is written; see [`write_outputs`].
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<RunOutput, PipelineError> {
    let mut files = BTreeMap::new();
    if let Some(src) = &config.source {
        let bytes = fs::read(src).map_err(|e| ConfigError::Read {
            path: src.display().to_string(),
            reason: e.to_string(),
        })?;
        files.insert(
            "config".to_string(),
            FileHash {
                path: src.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
                sha256: sha256_hex(&bytes),
            },
        );
    }
    let similarity = SimilarityConfig::new(config.metric.kind, config.metric.clamp_delta_px, config.metric.baseline_px)
        .map_err(|e| ConfigError::InvalidValue {
            key: "metric".into(),
            reason: e.to_string(),
        })?;
    let start_line = StartLine::new(
        twin_point("start_line.a", config.start_line.a)?,
        twin_point("start_line.b", config.start_line.b)?,
        config.start_line.min_crossing_interval_s,
    )
    .map_err(|e| ConfigError::InvalidValue {
        key: "start_line".into(),
        reason: e.to_string(),
    })?;

    // track
    hash_file("track.image", &config.track.image, &mut files)?;
    let track = TrackImage::load(&config.track.image.resolved, config.track.threshold).map_err(PipelineError::Track)?;
    let reference = match &config.track.reference_path {
        Some(p) => {
            hash_file("track.reference_path", p, &mut files)?;
            ReferencePath::load(&p.resolved).map_err(PipelineError::Track)?
        }
        None => extract_reference_path(&track, config.track.is_bright, config.track.resample_count)
            .map_err(PipelineError::Track)?,
    };

    // calibration
    hash_file("calibration.keypoints", &config.calibration.keypoints, &mut files)?;
    let keypoints = KeypointSet::load(&config.calibration.keypoints.resolved).map_err(PipelineError::Calibration)?;
    let twin_size = keypoints.image_size_twin();
    if (twin_size.width, twin_size.height) != (track.width(), track.height()) {
        return Err(PipelineError::Calibration(GeometryError::KeypointFile(format!(
            "keypoints were picked on a {}x{} twin image but the track image is {}x{}",
            twin_size.width,
            twin_size.height,
            track.width(),
            track.height()
        ))));
    }

    // detections
    let detections = match &config.detections.source {
        DetectionSource::File(p) => {
            let bytes = hash_file("detections.path", p, &mut files)?;
            let text = String::from_utf8(bytes).map_err(|e| {
                PipelineError::Detection(DetectionError::Io(format!("{}: {e}", p.resolved.display())))
            })?;
            parse_detections_str(&text).map_err(PipelineError::Detection)?
        }
        DetectionSource::Detector { command, frames_dir } => {
            let (records, stdout) =
                run_external_detector(command, &frames_dir.resolved).map_err(PipelineError::Detection)?;
            files.insert(
                "detector.output".to_string(),
                FileHash {
                    path: frames_dir.raw.clone(),
                    sha256: sha256_hex(stdout.as_bytes()),
                },
            );
            records
        }
    };

    let inputs = TrialInputs {
        reference,
        keypoints,
        detections,
        fps: config.detections.fps,
        min_confidence: config.detections.min_confidence,
        smoothing_window: config.detections.smoothing_window,
        scoring: ScoringConfig {
            similarity,
            start_line,
            required_laps: config.metric.required_laps,
            corridor_px: config.metric.corridor_px,
            min_offtrack_s: config.metric.min_offtrack_s,
            direction_auto: config.metric.direction_auto,
        },
        max_average_error_px: config.calibration.max_average_error_px,
    };
    let eval = evaluate(&inputs)?;

    let t = &eval.twin_trajectory;
    let samples = t.samples();
    let report = BenchmarkReport {
        config: ConfigEcho {
            settings: serde_json::to_value(config).expect("config is serializable"),
            files,
        },
        calibration: CalibrationBlock {
            homography: eval.homography.clone(),
            diagnostics: eval.diagnostics.clone(),
            leave_one_out: eval.leave_one_out.clone(),
            max_average_error_px: config.calibration.max_average_error_px,
        },
        score: ScoreBlock::new(&eval.score, config.metric.baseline_px),
        trajectory_stats: TrajectoryStats {
            sample_count: t.len(),
            gap_count: t.gaps().len(),
            gap_frames: t.gaps().iter().map(|g| g.len()).sum(),
            first_frame: samples.first().map_or(0, |s| s.frame_index),
            last_frame: samples.last().map_or(0, |s| s.frame_index),
            duration_seconds: t.duration(),
            fps: t.fps(),
        },
        version: VERSION.to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let overlay_svg = render_overlay(&OverlayInputs {
        track: &track,
        reference: &inputs.reference,
        trajectory: t,
        start_line: &start_line,
        keypoints: &inputs.keypoints,
        failure_events: &eval.score.failure_events,
    });
    Ok(RunOutput {
        report,
        overlay_svg,
        output_dir: config.output_dir.resolved.clone(),
    })
}

pub const REPORT_FILE: &str = "report.json";
pub const OVERLAY_FILE: &str = "overlay.svg";

/// Writes `report.json` and `overlay.svg` via temporary files and renames.
pub fn write_outputs(run: &RunOutput) -> Result<(PathBuf, PathBuf), PipelineError> {
    let out = |e: std::io::Error, p: &Path| PipelineError::Output(format!("{}: {e}", p.display()));
    fs::create_dir_all(&run.output_dir).map_err(|e| out(e, &run.output_dir))?;
    let mut written = Vec::new();
    for (name, body) in [
        (REPORT_FILE, run.report.to_json_string()),
        (OVERLAY_FILE, run.overlay_svg.clone()),
    ] {
        let target = run.output_dir.join(name);
        let tmp = run.output_dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, body).map_err(|e| out(e, &tmp))?;
        written.push((tmp, target));
    }
    for (tmp, target) in &written {
        fs::rename(tmp, target).map_err(|e| out(e, target))?;
    }
    Ok((written[0].1.clone(), written[1].1.clone()))
}

/// Loads the config, runs and writes outputs.
pub fn run_benchmark_file(config_path: &Path) -> Result<RunOutput, PipelineError> {
    let config = BenchmarkConfig::load(config_path)?;
    let run = run_benchmark(&config)?;
    write_outputs(&run)?;
    Ok(run)
}

/// Suggested baseline for a reference path file.
pub fn suggest_baseline_for(path: &Path) -> Result<(ReferencePath, f64), TrackError> {
    let reference = ReferencePath::load(path)?;
    let b = crate::metrics::suggest_baseline(reference.arc_length());
    Ok((reference, b))
}

/// Reference path straight from a track image.
pub fn process_track(
    image: &Path,
    threshold: u8,
    track_is_bright: bool,
    resample_count: usize,
) -> Result<ReferencePath, TrackError> {
    let track = TrackImage::load(image, threshold)?;
    extract_reference_path(&track, track_is_bright, resample_count)
}
