//! Ingestion of per-frame robot detections and trajectory construction.
//!
//! Detections arrive as JSON lines from any external detector:
//!
//! ```text
//! {"frame_index":0,"bbox":[10,10,30,50],"confidence":0.9}
//! {"frame_index":1,"centroid":[21.5,30.0]}
//! ```
//!
//! The centroid of a record is its bounding-box center unless given
//! explicitly. Frames without a surviving detection are kept as gaps and are
//! never interpolated.

use std::io::BufRead;
use std::path::Path;
use std::process::Command;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Frame, GeometryError, Homography, Point2};

pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectionError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: frame_index {found} follows {previous}")]
    NonMonotonicFrames {
        line: usize,
        previous: u64,
        found: u64,
    },
    #[error("no detection reaches confidence {min_confidence}")]
    NoDetections { min_confidence: f64 },
    #[error("fps must be positive and finite, got {0}")]
    InvalidFps(f64),
    #[error("smoothing window must be odd and positive, got {0}")]
    InvalidWindow(usize),
    #[error("frame {frame_index}: detection maps to infinity")]
    PointAtInfinity { frame_index: u64 },
    #[error("trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("detector command failed: {0}")]
    Detector(String),
    #[error("reading detections: {0}")]
    Io(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn center(&self) -> [f64; 2] {
        [(self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0]
    }
}

/// A validated detection in camera pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub frame_index: u64,
    pub bbox: Option<BoundingBox>,
    pub centroid: Point2,
    pub confidence: f64,
}

/// Raw JSONL line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionLine {
    pub frame_index: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centroid: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl DetectionLine {
    fn validate(self) -> Result<DetectionRecord, String> {
        let frame_index =
            u64::try_from(self.frame_index).map_err(|_| "frame_index must be non-negative".to_string())?;
        let confidence = self.confidence.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&confidence) {
            return Err(format!("confidence {confidence} outside [0, 1]"));
        }
        let bbox = match self.bbox {
            Some([x_min, y_min, x_max, y_max]) => {
                if [x_min, y_min, x_max, y_max].iter().any(|v| !v.is_finite()) {
                    return Err("bbox has non-finite values".into());
                }
                if x_min >= x_max || y_min >= y_max {
                    return Err(format!("bbox [{x_min}, {y_min}, {x_max}, {y_max}] is empty"));
                }
                Some(BoundingBox {
                    x_min,
                    y_min,
                    x_max,
                    y_max,
                })
            }
            None => None,
        };
        let centroid = match (self.centroid, bbox) {
            (Some(c), Some(b)) => {
                let center = b.center();
                if (c[0] - center[0]).hypot(c[1] - center[1]) > 0.5 {
                    return Err(format!("centroid {c:?} is not the bbox center {center:?}"));
                }
                c
            }
            (Some(c), None) => c,
            (None, Some(b)) => b.center(),
            (None, None) => return Err("needs bbox or centroid".into()),
        };
        let centroid = Point2::camera(centroid[0], centroid[1]).map_err(|e| e.to_string())?;
        Ok(DetectionRecord {
            frame_index,
            bbox,
            centroid,
            confidence,
        })
    }
}

impl From<&DetectionRecord> for DetectionLine {
    fn from(r: &DetectionRecord) -> Self {
        DetectionLine {
            frame_index: r.frame_index as i64,
            bbox: r.bbox.map(|b| [b.x_min, b.y_min, b.x_max, b.y_max]),
            centroid: Some(r.centroid.xy()),
            confidence: Some(r.confidence),
        }
    }
}

/// Parses a JSONL detection stream. Blank lines are skipped; per frame the
/// highest-confidence record wins (the first one on ties).
pub fn parse_detections(stream: impl BufRead) -> Result<Vec<DetectionRecord>, DetectionError> {
    let mut out: Vec<DetectionRecord> = Vec::new();
    for (i, line) in stream.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| DetectionError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: DetectionLine =
            serde_json::from_str(&line).map_err(|e| DetectionError::MalformedLine {
                line: line_no,
                reason: e.to_string(),
            })?;
        let record = raw
            .validate()
            .map_err(|reason| DetectionError::MalformedLine {
                line: line_no,
                reason,
            })?;
        match out.last_mut() {
            Some(last) if record.frame_index < last.frame_index => {
                return Err(DetectionError::NonMonotonicFrames {
                    line: line_no,
                    previous: last.frame_index,
                    found: record.frame_index,
                });
            }
            Some(last) if record.frame_index == last.frame_index => {
                if record.confidence > last.confidence {
                    *last = record;
                }
            }
            _ => out.push(record),
        }
    }
    Ok(out)
}

pub fn parse_detections_str(text: &str) -> Result<Vec<DetectionRecord>, DetectionError> {
    parse_detections(text.as_bytes())
}

/// Serializes records back to JSONL (one line per record).
pub fn detections_to_jsonl(records: &[DetectionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&DetectionLine::from(r)).expect("serializable"));
        out.push('\n');
    }
    out
}

/// Runs an external detector as `sh -c "<command> <frames_dir>/*"` and parses
/// its stdout. The shell expands the glob into frame paths on argv.
pub fn run_external_detector(command: &str, frames_dir: &Path) -> Result<(Vec<DetectionRecord>, String), DetectionError> {
    let glob = frames_dir.join("*");
    let script = format!("{command} {}", shell_quote_glob(&glob.to_string_lossy()));
    let output = Command::new("sh")
        .arg("-c")
        .arg(&script)
        .output()
        .map_err(|e| DetectionError::Detector(format!("spawning `{script}`: {e}")))?;
    if !output.status.success() {
        return Err(DetectionError::Detector(format!(
            "`{script}` exited with {}: {}",
            output.status,
            String::from_utf8_lossy(&output.stderr).trim()
        )));
    }
    let stdout = String::from_utf8(output.stdout)
        .map_err(|e| DetectionError::Detector(format!("stdout is not UTF-8: {e}")))?;
    Ok((parse_detections_str(&stdout)?, stdout))
}

/// Quotes everything except a trailing `*` so the shell still globs.
fn shell_quote_glob(pattern: &str) -> String {
    let base = pattern.strip_suffix('*').unwrap_or(pattern);
    let quoted = format!("'{}'", base.replace('\'', r"'\''"));
    if pattern.ends_with('*') {
        quoted + "*"
    } else {
        quoted
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub frame_index: u64,
    pub time: f64,
    pub point: Point2,
}

/// Inclusive range of frames with no detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameGap {
    pub start_frame: u64,
    pub end_frame: u64,
}

impl FrameGap {
    pub fn len(&self) -> u64 {
        self.end_frame - self.start_frame + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Time-stamped positions in one frame. `time = frame_index / fps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    frame: Frame,
    fps: f64,
    gaps: Vec<FrameGap>,
}

impl Trajectory {
    /// Builds from `(frame_index, point)` pairs with strictly increasing
    /// frame indices. Gaps are derived from missing indices.
    pub fn from_frames(frame: Frame, fps: f64, frames: Vec<(u64, Point2)>) -> Result<Self, DetectionError> {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(DetectionError::InvalidFps(fps));
        }
        let mut gaps = Vec::new();
        for w in frames.windows(2) {
            let (a, b) = (w[0].0, w[1].0);
            if b <= a {
                return Err(DetectionError::InvalidTrajectory(format!(
                    "frame {b} does not follow {a}"
                )));
            }
            if b > a + 1 {
                gaps.push(FrameGap {
                    start_frame: a + 1,
                    end_frame: b - 1,
                });
            }
        }
        let samples = frames
            .into_iter()
            .map(|(frame_index, point)| {
                point.expect_frame(frame)?;
                Ok(Sample {
                    frame_index,
                    time: frame_index as f64 / fps,
                    point,
                })
            })
            .collect::<Result<Vec<_>, GeometryError>>()?;
        Ok(Self {
            samples,
            frame,
            fps,
            gaps,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn points(&self) -> Vec<Point2> {
        self.samples.iter().map(|s| s.point).collect()
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn gaps(&self) -> &[FrameGap] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time between the first and last sample.
    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.time - a.time,
            _ => 0.0,
        }
    }

    fn map_points(
        &self,
        frame: Frame,
        mut f: impl FnMut(&Sample) -> Result<Point2, DetectionError>,
    ) -> Result<Trajectory, DetectionError> {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                Ok(Sample {
                    point: f(s)?,
                    ..*s
                })
            })
            .collect::<Result<Vec<_>, DetectionError>>()?;
        Ok(Trajectory {
            samples,
            frame,
            fps: self.fps,
            gaps: self.gaps.clone(),
        })
    }
}

/// One sample per frame whose detection reaches `min_confidence`.
pub fn build_trajectory(
    records: &[DetectionRecord],
    fps: f64,
    min_confidence: f64,
) -> Result<Trajectory, DetectionError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(DetectionError::InvalidFps(fps));
    }
    let frames: Vec<(u64, Point2)> = records
        .iter()
        .filter(|r| r.confidence >= min_confidence)
        .map(|r| (r.frame_index, r.centroid))
        .collect();
    if frames.is_empty() {
        return Err(DetectionError::NoDetections { min_confidence });
    }
    Trajectory::from_frames(Frame::Camera, fps, frames)
}

/// Maps every sample through `h`; times, fps and gaps are kept.
pub fn transform_trajectory(t: &Trajectory, h: &Homography) -> Result<Trajectory, DetectionError> {
    if t.frame != h.source() {
        return Err(GeometryError::FrameMismatch {
            expected: h.source(),
            found: t.frame,
        }
        .into());
    }
    t.map_points(h.target(), |s| {
        h.apply(s.point).map_err(|e| match e {
            GeometryError::PointAtInfinity { .. } => DetectionError::PointAtInfinity {
                frame_index: s.frame_index,
            },
            other => other.into(),
        })
    })
}

/// Centered moving average within gap-free runs; windows are truncated at
/// run ends.
pub fn smooth_trajectory(t: &Trajectory, window: usize) -> Result<Trajectory, DetectionError> {
    if window == 0 || window % 2 == 0 {
        return Err(DetectionError::InvalidWindow(window));
    }
    if window == 1 {
        return Ok(t.clone());
    }
    let half = window / 2;
    let samples = &t.samples;
    // run_start[i]..run_end[i] bounds the gap-free run holding sample i
    let mut run_bounds = vec![(0usize, 0usize); samples.len()];
    let mut start = 0;
    for i in 0..samples.len() {
        let breaks = i + 1 == samples.len() || samples[i + 1].frame_index != samples[i].frame_index + 1;
        if breaks {
            for b in &mut run_bounds[start..=i] {
                *b = (start, i + 1);
            }
            start = i + 1;
        }
    }
    let frame = t.frame;
    let smoothed: Vec<Point2> = (0..samples.len())
        .map(|i| {
            let (lo, hi) = run_bounds[i];
            let a = i.saturating_sub(half).max(lo);
            let b = (i + half + 1).min(hi);
            let n = (b - a) as f64;
            let (sx, sy) = samples[a..b]
                .iter()
                .fold((0.0, 0.0), |(sx, sy), s| (sx + s.point.x(), sy + s.point.y()));
            Point2::from_raw(sx / n, sy / n, frame)
        })
        .collect();
    let mut i = 0;
    t.map_points(frame, |_| {
        let p = smoothed[i];
        i += 1;
        Ok(p)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cam(x: f64, y: f64) -> Point2 {
        Point2::camera(x, y).unwrap()
    }

    #[test]
    fn bbox_center_is_centroid() {
        let r = parse_detections_str(r#"{"frame_index":0,"bbox":[10,10,30,50],"confidence":0.9}"#).unwrap();
        assert_eq!(r[0].centroid.xy(), [20.0, 30.0]);
        assert_eq!(r[0].confidence, 0.9);
    }

    #[test]
    fn keeps_highest_confidence_per_frame() {
        let text = "{\"frame_index\":5,\"centroid\":[1,1],\"confidence\":0.4}\n\
                    {\"frame_index\":5,\"centroid\":[2,2],\"confidence\":0.8}\n\
                    {\"frame_index\":5,\"centroid\":[3,3],\"confidence\":0.8}\n";
        let r = parse_detections_str(text).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].centroid.xy(), [2.0, 2.0]);
    }

    #[test]
    fn malformed_lines() {
        let err = parse_detections_str("\n{\"frame_index\":-1}").unwrap_err();
        assert!(matches!(err, DetectionError::MalformedLine { line: 2, .. }));
        for bad in [
            r#"{"frame_index":0}"#,
            r#"{"frame_index":0,"bbox":[5,5,5,9]}"#,
            r#"{"frame_index":0,"centroid":[1,1],"confidence":1.5}"#,
            r#"{"frame_index":0,"bbox":[0,0,10,10],"centroid":[9,9]}"#,
            r#"not json"#,
        ] {
            assert!(
                matches!(parse_detections_str(bad), Err(DetectionError::MalformedLine { line: 1, .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn frames_must_not_decrease() {
        let text = "{\"frame_index\":3,\"centroid\":[1,1]}\n{\"frame_index\":2,\"centroid\":[1,1]}";
        assert!(matches!(
            parse_detections_str(text),
            Err(DetectionError::NonMonotonicFrames { line: 2, previous: 3, found: 2 })
        ));
    }

    #[test]
    fn missing_confidence_defaults_to_one() {
        let r = parse_detections_str(r#"{"frame_index":0,"centroid":[1,2]}"#).unwrap();
        assert_eq!(r[0].confidence, 1.0);
    }

    fn records(frames: &[(u64, f64)]) -> Vec<DetectionRecord> {
        frames
            .iter()
            .map(|&(f, c)| DetectionRecord {
                frame_index: f,
                bbox: None,
                centroid: cam(f as f64, 0.0),
                confidence: c,
            })
            .collect()
    }

    #[test]
    fn times_from_fps() {
        let t = build_trajectory(&records(&[(0, 1.0), (1, 1.0), (2, 1.0)]), 30.0, 0.25).unwrap();
        let times: Vec<f64> = t.samples().iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 1.0 / 30.0, 2.0 / 30.0]);
    }

    #[test]
    fn gaps_are_recorded() {
        let t = build_trajectory(&records(&[(0, 1.0), (5, 1.0)]), 30.0, 0.25).unwrap();
        assert_eq!(t.gaps(), &[FrameGap { start_frame: 1, end_frame: 4 }]);
        let low = build_trajectory(&records(&[(0, 1.0), (1, 0.1), (2, 1.0)]), 30.0, 0.25).unwrap();
        assert_eq!(low.gaps(), &[FrameGap { start_frame: 1, end_frame: 1 }]);
    }

    #[test]
    fn nothing_confident_enough() {
        assert!(matches!(
            build_trajectory(&records(&[(0, 0.1), (1, 0.2)]), 30.0, 0.25),
            Err(DetectionError::NoDetections { .. })
        ));
        assert!(matches!(
            build_trajectory(&records(&[(0, 1.0)]), 0.0, 0.25),
            Err(DetectionError::InvalidFps(_))
        ));
    }

    #[test]
    fn transform_identity_and_translation() {
        let t = Trajectory::from_frames(Frame::Camera, 10.0, vec![(0, cam(1.0, 2.0)), (3, cam(4.0, 5.0))]).unwrap();
        let id = transform_trajectory(&t, &Homography::identity(Frame::Camera, Frame::Twin)).unwrap();
        assert_eq!(id.frame(), Frame::Twin);
        assert_eq!(id.points()[1].xy(), [4.0, 5.0]);
        assert_eq!(id.gaps(), t.gaps());

        let h = Homography::camera_to_twin([[1.0, 0.0, 5.0], [0.0, 1.0, 7.0], [0.0, 0.0, 1.0]]).unwrap();
        let moved = transform_trajectory(&t, &h).unwrap();
        for (a, b) in t.points().iter().zip(moved.points()) {
            assert!((b.x() - a.x() - 5.0).abs() < 1e-12 && (b.y() - a.y() - 7.0).abs() < 1e-12);
        }
        assert!(transform_trajectory(&id, &h).is_err());
    }

    #[test]
    fn transform_reports_frame_at_infinity() {
        let t = Trajectory::from_frames(Frame::Camera, 10.0, vec![(0, cam(0.0, 0.0)), (7, cam(1.0, 3.0))]).unwrap();
        let h = Homography::camera_to_twin([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, -1.0]]).unwrap();
        assert!(matches!(
            transform_trajectory(&t, &h),
            Err(DetectionError::PointAtInfinity { frame_index: 7 })
        ));
    }

    fn line(points: &[[f64; 2]]) -> Trajectory {
        Trajectory::from_frames(
            Frame::Twin,
            10.0,
            points
                .iter()
                .enumerate()
                .map(|(i, p)| (i as u64, Point2::twin(p[0], p[1]).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn smoothing_examples() {
        let t = line(&[[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]]);
        assert_eq!(smooth_trajectory(&t, 1).unwrap(), t);
        assert_eq!(smooth_trajectory(&t, 3).unwrap().points()[1].xy(), [2.0, 0.0]);
        let spike = line(&[[0.0, 0.0], [3.0, 0.0], [0.0, 0.0]]);
        let s = smooth_trajectory(&spike, 3).unwrap();
        assert_eq!(s.points()[1].xy(), [1.0, 0.0]);
        assert_eq!(s.points()[0].xy(), [1.5, 0.0]);
        assert!(matches!(smooth_trajectory(&t, 2), Err(DetectionError::InvalidWindow(2))));
    }

    #[test]
    fn smoothing_respects_gaps() {
        let t = Trajectory::from_frames(
            Frame::Twin,
            10.0,
            vec![
                (0, Point2::twin(0.0, 0.0).unwrap()),
                (1, Point2::twin(2.0, 0.0).unwrap()),
                (5, Point2::twin(100.0, 0.0).unwrap()),
            ],
        )
        .unwrap();
        let s = smooth_trajectory(&t, 3).unwrap();
        assert_eq!(s.points()[1].xy(), [1.0, 0.0]);
        assert_eq!(s.points()[2].xy(), [100.0, 0.0]);
    }

    #[test]
    fn glob_quoting() {
        assert_eq!(shell_quote_glob("/a b/*"), "'/a b/'*");
        assert_eq!(shell_quote_glob("/x'y/*"), r"'/x'\''y/'*");
    }

    #[test]
    fn jsonl_round_trip() {
        let text = "{\"frame_index\":0,\"bbox\":[10.0,10.0,30.0,50.0],\"centroid\":[20.0,30.0],\"confidence\":0.5}\n";
        let r = parse_detections_str(text).unwrap();
        assert_eq!(detections_to_jsonl(&r), text);
    }
}
