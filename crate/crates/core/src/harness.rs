//! Synthetic ground truth: a pinhole camera over a flat track, rendered
//! track images, a robot driving the reference at constant speed and the
//! detection stream a perfect detector would emit.
//!
//! Randomness comes from `ChaCha8Rng` seeded by the scenario, so fixtures
//! are identical across platforms.

use std::fs;
use std::path::Path;

use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::detection::{detections_to_jsonl, BoundingBox, DetectionError, DetectionRecord, Trajectory};
use crate::geometry::{Frame, GeometryError, Homography, ImageSize, KeypointPair, KeypointSet, Point2};
use crate::metrics::{
    score_trajectory, suggest_baseline, BenchmarkScore, MetricKind, MetricsError, ScoringConfig, SimilarityConfig,
    StartLine,
};
use crate::track::{resample, ReferencePath, TrackError, TrackImage};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Overhead camera looking along the twin's -y axis, pitched down from the
/// horizon. `footprint_px` is the twin position directly below the camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraPose {
    pub height_m: f64,
    pub pitch_deg: f64,
    pub focal_length_px: f64,
    pub image_size: ImageSize,
    pub ground_scale_px_per_m: f64,
    pub footprint_px: [f64; 2],
}

impl Default for CameraPose {
    fn default() -> Self {
        Self {
            height_m: 2.15,
            pitch_deg: 41.0,
            focal_length_px: 1000.0,
            image_size: ImageSize::new(1920, 1080),
            ground_scale_px_per_m: 100.0,
            footprint_px: [250.0, 420.0],
        }
    }
}

impl CameraPose {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidScenario(msg));
        if !(self.height_m.is_finite() && self.height_m > 0.0) {
            return bad(format!("camera height {} must be positive", self.height_m));
        }
        if !(self.pitch_deg > 0.0 && self.pitch_deg < 90.0) {
            return bad(format!("pitch {} must lie in (0, 90) degrees", self.pitch_deg));
        }
        if !(self.focal_length_px.is_finite() && self.focal_length_px > 0.0) {
            return bad(format!("focal length {} must be positive", self.focal_length_px));
        }
        if !(self.ground_scale_px_per_m.is_finite() && self.ground_scale_px_per_m > 0.0) {
            return bad(format!("ground scale {} must be positive", self.ground_scale_px_per_m));
        }
        if self.image_size.width == 0 || self.image_size.height == 0 {
            return bad("camera image size must be positive".into());
        }
        if self.footprint_px.iter().any(|v| !v.is_finite()) {
            return bad("camera footprint must be finite".into());
        }
        Ok(())
    }

    /// Twin point imaged at the principal point.
    pub fn axis_ground_point(&self) -> [f64; 2] {
        let pitch = self.pitch_deg.to_radians();
        [
            self.footprint_px[0],
            self.footprint_px[1] - self.ground_scale_px_per_m * self.height_m / pitch.tan(),
        ]
    }
}

/// Exact twin -> camera homography for the ground plane.
///
/// Twin pixels become metres relative to the footprint, are rotated into the
/// camera by the pitch, offset by the height and projected through the
/// intrinsics (principal point at the image centre).
pub fn plane_homography(pose: &CameraPose) -> Result<Homography, HarnessError> {
    pose.validate()?;
    let p = pose.pitch_deg.to_radians();
    let (sin, cos) = p.sin_cos();
    let h = pose.height_m;
    let s = pose.ground_scale_px_per_m;
    let f = pose.focal_length_px;
    let (cx, cy) = (pose.image_size.width as f64 / 2.0, pose.image_size.height as f64 / 2.0);
    let [u, v] = pose.footprint_px;
    let intrinsics = Matrix3::new(f, 0.0, cx, 0.0, f, cy, 0.0, 0.0, 1.0);
    let extrinsics = Matrix3::new(1.0, 0.0, 0.0, 0.0, sin, h * cos, 0.0, -cos, h * sin);
    let to_metres = Matrix3::new(1.0 / s, 0.0, -u / s, 0.0, 1.0 / s, -v / s, 0.0, 0.0, 1.0);
    Ok(Homography::from_matrix(
        intrinsics * extrinsics * to_metres,
        Frame::Twin,
        Frame::Camera,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrackShape {
    /// Ellipse traversed from its rightmost point, clockwise on screen.
    Oval { center: [f64; 2], semi_axes: [f64; 2] },
    /// Lemniscate of Gerono: `(cx + a cos t, cy + b sin 2t)`.
    FigureEight {
        center: [f64; 2],
        half_width: f64,
        half_height: f64,
    },
}

impl TrackShape {
    fn at(&self, t: f64) -> [f64; 2] {
        match *self {
            TrackShape::Oval { center, semi_axes } => {
                [center[0] + semi_axes[0] * t.cos(), center[1] + semi_axes[1] * t.sin()]
            }
            TrackShape::FigureEight {
                center,
                half_width,
                half_height,
            } => [center[0] + half_width * t.cos(), center[1] + half_height * (2.0 * t).sin()],
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let dims = match *self {
            TrackShape::Oval { semi_axes, .. } => semi_axes,
            TrackShape::FigureEight {
                half_width,
                half_height,
                ..
            } => [half_width, half_height],
        };
        if dims.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(HarnessError::InvalidScenario(format!("track dimensions {dims:?} must be positive")));
        }
        Ok(())
    }

    /// Densely sampled closed polyline.
    pub fn polyline(&self, samples: usize) -> Vec<[f64; 2]> {
        (0..samples)
            .map(|k| self.at(std::f64::consts::TAU * k as f64 / samples as f64))
            .collect()
    }
}

fn default_twin_size() -> ImageSize {
    ImageSize::new(500, 350)
}
fn default_stroke() -> f64 {
    9.0
}
fn default_lead() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimScenario {
    pub track: TrackShape,
    #[serde(default = "default_twin_size")]
    pub twin_size: ImageSize,
    #[serde(default = "default_stroke")]
    pub stroke_width_px: f64,
    pub lap_time_s: f64,
    pub fps: f64,
    #[serde(default)]
    pub noise_sigma_px: f64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub camera: CameraPose,
    #[serde(default = "default_lead")]
    pub lead_in_s: f64,
    #[serde(default = "default_lead")]
    pub lead_out_s: f64,
}

impl SimScenario {
    /// Oval that fills most of the default twin image.
    pub fn oval(lap_time_s: f64, fps: f64, noise_sigma_px: f64, rng_seed: u64) -> Self {
        Self {
            track: TrackShape::Oval {
                center: [250.0, 175.0],
                semi_axes: [150.0, 90.0],
            },
            twin_size: default_twin_size(),
            stroke_width_px: default_stroke(),
            lap_time_s,
            fps,
            noise_sigma_px,
            rng_seed,
            camera: CameraPose::default(),
            lead_in_s: default_lead(),
            lead_out_s: default_lead(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidScenario(msg));
        self.track.validate()?;
        self.camera.validate()?;
        if !(self.lap_time_s.is_finite() && self.lap_time_s > 0.0) {
            return bad(format!("lap_time_s {} must be positive", self.lap_time_s));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return bad(format!("fps {} must be positive", self.fps));
        }
        if !(self.noise_sigma_px.is_finite() && self.noise_sigma_px >= 0.0) {
            return bad(format!("noise_sigma_px {} must be >= 0", self.noise_sigma_px));
        }
        if !(self.stroke_width_px >= 5.0) {
            return bad(format!("stroke width {} must be at least 5 px", self.stroke_width_px));
        }
        if !(self.lead_in_s >= 0.0 && self.lead_out_s >= 0.0) {
            return bad("lead-in and lead-out must be >= 0".into());
        }
        if self.twin_size.width == 0 || self.twin_size.height == 0 {
            return bad("twin size must be positive".into());
        }
        if (self.lap_time_s * self.fps).round() < 8.0 {
            return bad("a lap must span at least 8 frames".into());
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, HarnessError> {
        let s: Self = serde_json::from_str(text).map_err(|e| HarnessError::InvalidScenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }
}

/// Everything a simulated trial produces.
#[derive(Debug, Clone)]
pub struct SimTrial {
    pub scenario: SimScenario,
    pub track_image: TrackImage,
    pub reference: ReferencePath,
    pub keypoints: KeypointSet,
    pub detections: Vec<DetectionRecord>,
    pub twin_to_camera: Homography,
    pub start_line: StartLine,
    /// Noise-free robot positions in twin pixels.
    pub twin_trajectory: Trajectory,
    /// `vertex count / fps`, the lap time actually simulated.
    pub effective_lap_time_s: f64,
    pub truth: BenchmarkScore,
}

impl SimTrial {
    pub fn detections_jsonl(&self) -> String {
        detections_to_jsonl(&self.detections)
    }

    /// Scoring settings used for the ground truth.
    pub fn scoring_config(&self) -> ScoringConfig {
        truth_config(&self.reference, self.start_line)
    }
}

const RENDER_SAMPLES: usize = 2048;
const START_LINE_HALF_LENGTH: f64 = 20.0;
const DETECTION_HALF_SIZE: f64 = 15.0;

fn truth_config(reference: &ReferencePath, start_line: StartLine) -> ScoringConfig {
    ScoringConfig {
        similarity: SimilarityConfig::new(MetricKind::Dtw, None, suggest_baseline(reference.arc_length()))
            .expect("positive arc length"),
        start_line,
        required_laps: 1,
        corridor_px: 40.0,
        min_offtrack_s: 0.5,
        direction_auto: true,
    }
}

/// Anti-aliased bright stroke on a black background.
pub fn render_track(polyline: &[[f64; 2]], closed: bool, size: ImageSize, stroke_width: f64) -> TrackImage {
    let (w, h) = (size.width as usize, size.height as usize);
    let mut coverage = vec![0.0f64; w * h];
    let reach = stroke_width / 2.0 + 0.5;
    let n = polyline.len();
    let segments = if closed { n } else { n - 1 };
    for k in 0..segments {
        let (a, b) = (polyline[k], polyline[(k + 1) % n]);
        let x0 = (a[0].min(b[0]) - reach).floor().max(0.0) as usize;
        let x1 = ((a[0].max(b[0]) + reach).ceil().max(0.0) as usize).min(w.saturating_sub(1));
        let y0 = (a[1].min(b[1]) - reach).floor().max(0.0) as usize;
        let y1 = ((a[1].max(b[1]) + reach).ceil().max(0.0) as usize).min(h.saturating_sub(1));
        for y in y0..=y1 {
            for x in x0..=x1 {
                let d = crate::metrics::point_segment_distance([x as f64, y as f64], a, b);
                let c = (reach - d).clamp(0.0, 1.0);
                let cell = &mut coverage[y * w + x];
                if c > *cell {
                    *cell = c;
                }
            }
        }
    }
    let pixels = coverage.iter().map(|c| (c * 255.0).round() as u8).collect();
    TrackImage::new(size.width, size.height, pixels, crate::track::DEFAULT_THRESHOLD).expect("sized buffer")
}

/// Reference twin points: the corners of the track's bounding box grown by
/// `margin` px (clipped to the image), then four interior points placed so
/// that no three of the eight are collinear.
pub fn keypoint_twin_points(polyline: &[[f64; 2]], twin_size: ImageSize, margin: f64) -> Vec<[f64; 2]> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in polyline {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let max = [twin_size.width as f64, twin_size.height as f64];
    let clip = |v: f64, i: usize| v.clamp(0.0, max[i]);
    let (x0, y0) = (clip(lo[0] - margin, 0), clip(lo[1] - margin, 1));
    let (x1, y1) = (clip(hi[0] + margin, 0), clip(hi[1] + margin, 1));
    let at = |u: f64, v: f64| [x0 + u * (x1 - x0), y0 + v * (y1 - y0)];
    vec![
        at(0.0, 0.0),
        at(1.0, 0.0),
        at(1.0, 1.0),
        at(0.0, 1.0),
        at(0.5, 0.2),
        at(0.8, 0.55),
        at(0.45, 0.85),
        at(0.15, 0.5),
    ]
}

/// Pairs each twin point with its camera image, plus optional Gaussian noise
/// on the camera side. Points that leave the camera image are skipped.
pub fn synthetic_keypoints(
    twin_to_camera: &Homography,
    twin_points: &[[f64; 2]],
    camera_size: ImageSize,
    twin_size: ImageSize,
    noise_sigma_px: f64,
    rng: &mut ChaCha8Rng,
) -> Result<KeypointSet, HarnessError> {
    let noise = gaussian(noise_sigma_px)?;
    let mut set = KeypointSet::empty(camera_size, twin_size)?;
    for (i, &t) in twin_points.iter().enumerate() {
        let twin = Point2::twin(t[0], t[1])?;
        let Ok(cam) = twin_to_camera.apply(twin) else {
            continue;
        };
        let [dx, dy] = sample_noise(noise.as_ref(), rng);
        let camera = Point2::camera(cam.x() + dx, cam.y() + dy)?;
        if !camera_size.contains(&camera) {
            continue;
        }
        set.push(KeypointPair::new(camera, twin, Some(format!("k{i}")))?)?;
    }
    Ok(set)
}

fn gaussian(sigma: f64) -> Result<Option<Normal<f64>>, HarnessError> {
    if sigma == 0.0 {
        return Ok(None);
    }
    Normal::new(0.0, sigma)
        .map(Some)
        .map_err(|e| HarnessError::InvalidScenario(format!("noise sigma {sigma}: {e}")))
}

fn sample_noise(noise: Option<&Normal<f64>>, rng: &mut ChaCha8Rng) -> [f64; 2] {
    match noise {
        Some(n) => [n.sample(rng), n.sample(rng)],
        None => [0.0, 0.0],
    }
}

/// Renders the track, drives one lap plus lead-in/out at constant speed,
/// projects into the camera with seeded noise and scores the noise-free
/// run as ground truth.
///
/// The robot visits one reference vertex per frame, so the reference has
/// `round(lap_time * fps)` vertices. The start line crosses the step from
/// vertex 0 to vertex 1 at its midpoint.
pub fn simulate_trial(scenario: &SimScenario) -> Result<SimTrial, HarnessError> {
    scenario.validate()?;
    let twin_to_camera = plane_homography(&scenario.camera)?;
    let dense = scenario.track.polyline(RENDER_SAMPLES);
    let track_image = render_track(&dense, true, scenario.twin_size, scenario.stroke_width_px);

    let vertex_count = (scenario.lap_time_s * scenario.fps).round() as usize;
    let reference = resample(&ReferencePath::from_coords(&dense, true)?, vertex_count)?;
    let vertices = reference.points();

    let (v0, v1) = (vertices[0].xy(), vertices[1].xy());
    let mid = [(v0[0] + v1[0]) / 2.0, (v0[1] + v1[1]) / 2.0];
    let dir = [v1[0] - v0[0], v1[1] - v0[1]];
    let len = dir[0].hypot(dir[1]);
    let normal = [-dir[1] / len * START_LINE_HALF_LENGTH, dir[0] / len * START_LINE_HALF_LENGTH];
    let start_line = StartLine::new(
        Point2::twin(mid[0] - normal[0], mid[1] - normal[1])?,
        Point2::twin(mid[0] + normal[0], mid[1] + normal[1])?,
        0.5 * scenario.lap_time_s,
    )?;

    let lead_in = ((scenario.lead_in_s * scenario.fps).round() as usize).max(1);
    let lead_out = ((scenario.lead_out_s * scenario.fps).round() as usize).max(2);
    let frames = lead_in + vertex_count + lead_out;
    let twin_frames: Vec<(u64, Point2)> = (0..frames)
        .map(|j| (j as u64, vertices[(j + vertex_count - lead_in % vertex_count) % vertex_count]))
        .collect();
    let twin_trajectory = Trajectory::from_frames(Frame::Twin, scenario.fps, twin_frames)?;

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.rng_seed);
    let noise = gaussian(scenario.noise_sigma_px)?;
    let mut detections = Vec::with_capacity(frames);
    for s in twin_trajectory.samples() {
        let cam = twin_to_camera.apply(s.point)?;
        let [dx, dy] = sample_noise(noise.as_ref(), &mut rng);
        let centroid = Point2::camera(cam.x() + dx, cam.y() + dy)?;
        detections.push(DetectionRecord {
            frame_index: s.frame_index,
            bbox: Some(BoundingBox {
                x_min: centroid.x() - DETECTION_HALF_SIZE,
                y_min: centroid.y() - DETECTION_HALF_SIZE,
                x_max: centroid.x() + DETECTION_HALF_SIZE,
                y_max: centroid.y() + DETECTION_HALF_SIZE,
            }),
            centroid,
            confidence: 1.0,
        });
    }

    let keypoint_twin = keypoint_twin_points(&dense, scenario.twin_size, 20.0);
    let keypoints = synthetic_keypoints(
        &twin_to_camera,
        &keypoint_twin,
        scenario.camera.image_size,
        scenario.twin_size,
        0.0,
        &mut rng,
    )?;
    if keypoints.len() < 4 {
        return Err(HarnessError::InvalidScenario(format!(
            "only {} keypoints are visible to the camera",
            keypoints.len()
        )));
    }

    let truth = score_trajectory(&twin_trajectory, &reference, &truth_config(&reference, start_line))?;
    Ok(SimTrial {
        scenario: scenario.clone(),
        track_image,
        reference,
        keypoints,
        detections,
        twin_to_camera,
        start_line,
        twin_trajectory,
        effective_lap_time_s: vertex_count as f64 / scenario.fps,
        truth,
    })
}

pub const FIXTURE_FILES: [&str; 6] = [
    "track.png",
    "ref_path.json",
    "keypoints.json",
    "detections.jsonl",
    "truth.json",
    "benchmark.json",
];

/// Writes the fixture directory. `benchmark.json` is a ready-to-run
/// benchmark config using the exported reference path.
pub fn write_fixture(trial: &SimTrial, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    trial.track_image.save_png(&dir.join("track.png"))?;
    trial.reference.save(&dir.join("ref_path.json"))?;
    trial.keypoints.save(&dir.join("keypoints.json"))?;
    let det = dir.join("detections.jsonl");
    fs::write(&det, trial.detections_jsonl()).map_err(io_err(&det))?;

    let truth = json!({
        "scenario": trial.scenario,
        "effective_lap_time_s": trial.effective_lap_time_s,
        "frame_count": trial.detections.len(),
        "twin_to_camera": trial.twin_to_camera,
        "start_line": {
            "a": trial.start_line.a.xy(),
            "b": trial.start_line.b.xy(),
            "min_crossing_interval_s": trial.start_line.min_crossing_interval,
        },
        "score": trial.truth,
    });
    let truth_path = dir.join("truth.json");
    fs::write(&truth_path, serde_json::to_string_pretty(&truth).expect("serializable") + "\n")
        .map_err(io_err(&truth_path))?;

    let config = json!({
        "track": { "image": "track.png", "reference_path": "ref_path.json" },
        "calibration": { "keypoints": "keypoints.json" },
        "detections": { "path": "detections.jsonl", "fps": trial.scenario.fps },
        "metric": {
            "kind": "dtw",
            "baseline_px": suggest_baseline(trial.reference.arc_length()),
        },
        "start_line": {
            "a": trial.start_line.a.xy(),
            "b": trial.start_line.b.xy(),
            "min_crossing_interval_s": trial.start_line.min_crossing_interval,
        },
        "output": { "dir": "out" },
    });
    let config_path = dir.join("benchmark.json");
    fs::write(&config_path, serde_json::to_string_pretty(&config).expect("serializable") + "\n")
        .map_err(io_err(&config_path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_point_maps_to_principal_point() {
        let pose = CameraPose::default();
        let h = plane_homography(&pose).unwrap();
        let g = pose.axis_ground_point();
        let c = h.apply(Point2::twin(g[0], g[1]).unwrap()).unwrap();
        assert!((c.x() - 960.0).abs() < 1e-9 && (c.y() - 540.0).abs() < 1e-9, "{c:?}");
    }

    #[test]
    fn nadir_limit_is_a_similarity() {
        let pose = CameraPose {
            pitch_deg: 90.0 - 1e-9,
            footprint_px: [0.0, 0.0],
            ..CameraPose::default()
        };
        let m = plane_homography(&pose).unwrap().rows();
        let scale = m[2][2];
        // f / (s * h) on the diagonal, no perspective row
        let expected = 1000.0 / (100.0 * 2.15);
        assert!((m[0][0] / scale - expected).abs() < 1e-6);
        assert!((m[1][1] / scale - expected).abs() < 1e-6);
        assert!(m[0][1].abs() < 1e-9 && m[1][0].abs() < 1e-9);
        assert!((m[2][0] / scale).abs() < 1e-9 && (m[2][1] / scale).abs() < 1e-9);
    }

    #[test]
    fn pose_validation() {
        let mut pose = CameraPose::default();
        pose.pitch_deg = 90.0;
        assert!(plane_homography(&pose).is_err());
        pose.pitch_deg = 41.0;
        pose.height_m = 0.0;
        assert!(plane_homography(&pose).is_err());
    }

    #[test]
    fn oval_keypoints_are_all_visible() {
        let trial = simulate_trial(&SimScenario::oval(10.0, 30.0, 0.0, 1)).unwrap();
        assert_eq!(trial.keypoints.len(), 8);
        assert_eq!(trial.reference.len(), 300);
        assert_eq!(trial.detections.len(), 30 + 300 + 30);
        assert_eq!(trial.truth.similarity_percent, 100.0);
        assert!((trial.truth.completion_seconds.unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn scenario_json_defaults() {
        let s = SimScenario::from_json_str(
            r#"{"track":{"kind":"oval","center":[250,175],"semi_axes":[150,90]},"lap_time_s":10,"fps":30}"#,
        )
        .unwrap();
        assert_eq!(s, SimScenario::oval(10.0, 30.0, 0.0, 0));
        assert!(SimScenario::from_json_str(r#"{"track":{"kind":"oval","center":[0,0],"semi_axes":[1,1]},"lap_time_s":10,"fps":30,"typo":1}"#).is_err());
        assert!(SimScenario::from_json_str(r#"{"track":{"kind":"oval","center":[0,0],"semi_axes":[1,1]},"lap_time_s":10,"fps":0}"#).is_err());
    }

    #[test]
    fn rendered_stroke_profile() {
        let img = render_track(&[[2.0, 10.0], [30.0, 10.0]], false, ImageSize::new(40, 21), 9.0);
        assert_eq!(img.get(15, 10), 255);
        assert_eq!(img.get(15, 14), 255);
        assert_eq!(img.get(15, 15), 0);
        assert_eq!(img.get(15, 5), 0);
    }
}
