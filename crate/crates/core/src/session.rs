//! State behind the interactive keypoint tool: one camera frame, one twin
//! image and a working keypoint set with live diagnostics.

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    estimate_homography, keypoint_error_curve, leave_one_out, reprojection_diagnostics, CalibrationDiagnostics,
    ErrorCurvePoint, GeometryError, Homography, ImageSize, KeypointFile, KeypointPair, KeypointSet,
};
use crate::track::TrackImage;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("unreadable image {path}: {reason}")]
    InvalidImage { path: String, reason: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("writing {path}: {reason}")]
    Export { path: String, reason: String },
}

/// Calibration state after a change to the keypoint set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KeypointStatus {
    /// Fewer than four pairs.
    Pending { count: usize },
    /// Four or more pairs that do not determine a homography.
    Degenerate { count: usize, reason: String },
    Ready {
        count: usize,
        homography: Homography,
        diagnostics: CalibrationDiagnostics,
        /// Present from five pairs on.
        #[serde(skip_serializing_if = "Option::is_none")]
        leave_one_out: Option<CalibrationDiagnostics>,
    },
}

/// Diagnostics exactly as the benchmark pipeline computes them.
pub fn keypoint_status(set: &KeypointSet) -> KeypointStatus {
    let count = set.len();
    if count < 4 {
        return KeypointStatus::Pending { count };
    }
    let fit = || -> Result<KeypointStatus, GeometryError> {
        let homography = estimate_homography(set)?;
        let diagnostics = reprojection_diagnostics(&homography, set)?;
        let leave_one_out = if count >= 5 { Some(leave_one_out(set)?) } else { None };
        Ok(KeypointStatus::Ready {
            count,
            homography,
            diagnostics,
            leave_one_out,
        })
    };
    fit().unwrap_or_else(|e| KeypointStatus::Degenerate {
        count,
        reason: e.to_string(),
    })
}

#[derive(Debug, Clone)]
struct LoadedImage {
    path: PathBuf,
    size: ImageSize,
    png: Vec<u8>,
}

fn load_image(path: &Path) -> Result<LoadedImage, SessionError> {
    if !path.is_file() {
        return Err(SessionError::FileNotFound(path.display().to_string()));
    }
    let img = TrackImage::load(path, 0).map_err(|e| SessionError::InvalidImage {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    Ok(LoadedImage {
        path: path.to_path_buf(),
        size: ImageSize::new(img.width(), img.height()),
        png: img.encode_png(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub camera_path: String,
    pub twin_path: String,
    pub image_size_camera: ImageSize,
    pub image_size_twin: ImageSize,
    pub keypoints: KeypointFile,
    #[serde(flatten)]
    pub status: KeypointStatus,
}

#[derive(Debug, Clone)]
pub struct CalibrationSession {
    id: String,
    camera: LoadedImage,
    twin: LoadedImage,
    keypoints: KeypointSet,
}

impl CalibrationSession {
    /// Opens both images. Color inputs are served as grayscale PNG.
    pub fn start(id: String, camera_path: &Path, twin_path: &Path) -> Result<Self, SessionError> {
        let camera = load_image(camera_path)?;
        let twin = load_image(twin_path)?;
        let keypoints = KeypointSet::empty(camera.size, twin.size)?;
        Ok(Self {
            id,
            camera,
            twin,
            keypoints,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn keypoints(&self) -> &KeypointSet {
        &self.keypoints
    }

    pub fn camera_png(&self) -> &[u8] {
        &self.camera.png
    }

    pub fn twin_png(&self) -> &[u8] {
        &self.twin.png
    }

    pub fn status(&self) -> KeypointStatus {
        keypoint_status(&self.keypoints)
    }

    pub fn add(&mut self, pair: KeypointPair) -> Result<KeypointStatus, SessionError> {
        self.keypoints.push(pair)?;
        Ok(self.status())
    }

    pub fn remove(&mut self, index: usize) -> Result<KeypointStatus, SessionError> {
        self.keypoints.remove(index)?;
        Ok(self.status())
    }

    pub fn error_curve(&self) -> Result<Vec<ErrorCurvePoint>, SessionError> {
        Ok(keypoint_error_curve(&self.keypoints, 4)?)
    }

    /// Writes the keypoints file; needs at least four pairs.
    pub fn export(&self, path: &Path) -> Result<(), SessionError> {
        if self.keypoints.len() < 4 {
            return Err(GeometryError::TooFewPoints {
                required: 4,
                found: self.keypoints.len(),
            }
            .into());
        }
        self.keypoints.save(path).map_err(|e| SessionError::Export {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            session_id: self.id.clone(),
            camera_path: self.camera.path.display().to_string(),
            twin_path: self.twin.path.display().to_string(),
            image_size_camera: self.camera.size,
            image_size_twin: self.twin.size,
            keypoints: KeypointFile::from(&self.keypoints),
            status: self.status(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn images(dir: &Path) -> (PathBuf, PathBuf) {
        let cam = dir.join("cam.png");
        let twin = dir.join("twin.png");
        TrackImage::new(100, 80, vec![50; 8000], 128).unwrap().save_png(&cam).unwrap();
        TrackImage::new(60, 40, vec![200; 2400], 128).unwrap().save_png(&twin).unwrap();
        (cam, twin)
    }

    fn pair(c: [f64; 2], t: [f64; 2]) -> KeypointPair {
        KeypointPair::from_coords(c, t).unwrap()
    }

    #[test]
    fn pending_then_ready() {
        let dir = tempfile::tempdir().unwrap();
        let (cam, twin) = images(dir.path());
        let mut s = CalibrationSession::start("s".into(), &cam, &twin).unwrap();
        let corners = [[0.0, 0.0], [50.0, 0.0], [50.0, 40.0], [0.0, 40.0], [25.0, 10.0]];
        for (i, c) in corners.iter().take(3).enumerate() {
            assert_eq!(s.add(pair(*c, [c[0] / 2.0, c[1] / 2.0])).unwrap(), KeypointStatus::Pending { count: i + 1 });
        }
        let KeypointStatus::Ready { diagnostics, leave_one_out, .. } =
            s.add(pair(corners[3], [0.0, 20.0])).unwrap()
        else {
            panic!("expected diagnostics");
        };
        assert!(diagnostics.average_error < 1e-9);
        assert!(leave_one_out.is_none());
        let KeypointStatus::Ready { leave_one_out, .. } = s.add(pair(corners[4], [12.5, 5.0])).unwrap() else {
            panic!("expected diagnostics");
        };
        assert!(leave_one_out.unwrap().average_error < 1e-6);
        assert!(matches!(s.remove(4).unwrap(), KeypointStatus::Ready { count: 4, .. }));
        assert_eq!(s.remove(3).unwrap(), KeypointStatus::Pending { count: 3 });
        assert!(matches!(
            s.remove(99),
            Err(SessionError::Geometry(GeometryError::IndexOutOfRange { .. }))
        ));
    }

    #[test]
    fn validation_errors() {
        let dir = tempfile::tempdir().unwrap();
        let (cam, twin) = images(dir.path());
        assert!(matches!(
            CalibrationSession::start("s".into(), &cam, &dir.path().join("missing.png")),
            Err(SessionError::FileNotFound(_))
        ));
        let mut s = CalibrationSession::start("s".into(), &cam, &twin).unwrap();
        assert!(matches!(
            s.add(pair([-5.0, 3.0], [1.0, 1.0])),
            Err(SessionError::Geometry(GeometryError::OutOfBounds { .. }))
        ));
        s.add(pair([5.0, 3.0], [1.0, 1.0])).unwrap();
        assert!(matches!(
            s.add(pair([5.0, 3.0], [2.0, 1.0])),
            Err(SessionError::Geometry(GeometryError::DuplicateCameraPoint { .. }))
        ));
        assert!(matches!(
            s.export(&dir.path().join("k.json")),
            Err(SessionError::Geometry(GeometryError::TooFewPoints { .. }))
        ));
    }

    #[test]
    fn collinear_four_is_degenerate() {
        let dir = tempfile::tempdir().unwrap();
        let (cam, twin) = images(dir.path());
        let mut s = CalibrationSession::start("s".into(), &cam, &twin).unwrap();
        for (c, t) in [([0.0, 0.0], [0.0, 0.0]), ([10.0, 0.0], [5.0, 0.0]), ([20.0, 0.0], [10.0, 0.0])] {
            s.add(pair(c, t)).unwrap();
        }
        assert!(matches!(
            s.add(pair([5.0, 30.0], [2.0, 15.0])).unwrap(),
            KeypointStatus::Degenerate { count: 4, .. }
        ));
    }
}
