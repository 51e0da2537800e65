use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Frame, GeometryError, Point2};

/// Width and height of an image in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl ImageSize {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }

    /// Inclusive bounds check: `0 <= x <= width`, `0 <= y <= height`.
    pub fn contains(&self, p: &Point2) -> bool {
        p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= self.width as f64 && p.y() <= self.height as f64
    }
}

impl From<[u32; 2]> for ImageSize {
    fn from([width, height]: [u32; 2]) -> Self {
        Self { width, height }
    }
}

impl From<ImageSize> for [u32; 2] {
    fn from(s: ImageSize) -> Self {
        [s.width, s.height]
    }
}

/// One hand-picked correspondence between the camera image and the twin.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointPair {
    pub camera: Point2,
    pub twin: Point2,
    pub label: Option<String>,
}

impl KeypointPair {
    pub fn new(camera: Point2, twin: Point2, label: Option<String>) -> Result<Self, GeometryError> {
        camera.expect_frame(Frame::Camera)?;
        twin.expect_frame(Frame::Twin)?;
        Ok(Self {
            camera,
            twin,
            label,
        })
    }

    pub fn from_coords(camera: [f64; 2], twin: [f64; 2]) -> Result<Self, GeometryError> {
        Self::new(
            Point2::camera(camera[0], camera[1])?,
            Point2::twin(twin[0], twin[1])?,
            None,
        )
    }
}

/// An ordered, validated list of keypoint pairs with the image sizes they
/// were picked on.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointSet {
    pairs: Vec<KeypointPair>,
    image_size_camera: ImageSize,
    image_size_twin: ImageSize,
}

impl KeypointSet {
    pub fn new(
        image_size_camera: ImageSize,
        image_size_twin: ImageSize,
        pairs: Vec<KeypointPair>,
    ) -> Result<Self, GeometryError> {
        for size in [image_size_camera, image_size_twin] {
            if size.width == 0 || size.height == 0 {
                return Err(GeometryError::InvalidImageSize {
                    width: size.width,
                    height: size.height,
                });
            }
        }
        let mut set = Self {
            pairs: Vec::with_capacity(pairs.len()),
            image_size_camera,
            image_size_twin,
        };
        for pair in pairs {
            set.push(pair)?;
        }
        Ok(set)
    }

    pub fn empty(image_size_camera: ImageSize, image_size_twin: ImageSize) -> Result<Self, GeometryError> {
        Self::new(image_size_camera, image_size_twin, Vec::new())
    }

    /// Appends a pair after checking bounds and camera-point uniqueness.
    pub fn push(&mut self, pair: KeypointPair) -> Result<(), GeometryError> {
        let index = self.pairs.len();
        pair.camera.expect_frame(Frame::Camera)?;
        pair.twin.expect_frame(Frame::Twin)?;
        for (point, size) in [
            (&pair.camera, self.image_size_camera),
            (&pair.twin, self.image_size_twin),
        ] {
            if !size.contains(point) {
                return Err(GeometryError::OutOfBounds {
                    index,
                    frame: point.frame(),
                    x: point.x(),
                    y: point.y(),
                });
            }
        }
        if let Some(first) = self
            .pairs
            .iter()
            .position(|p| p.camera.xy() == pair.camera.xy())
        {
            return Err(GeometryError::DuplicateCameraPoint {
                first,
                second: index,
            });
        }
        self.pairs.push(pair);
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> Result<KeypointPair, GeometryError> {
        if index >= self.pairs.len() {
            return Err(GeometryError::IndexOutOfRange {
                index,
                len: self.pairs.len(),
            });
        }
        Ok(self.pairs.remove(index))
    }

    pub fn pairs(&self) -> &[KeypointPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn image_size_camera(&self) -> ImageSize {
        self.image_size_camera
    }

    pub fn image_size_twin(&self) -> ImageSize {
        self.image_size_twin
    }

    /// The first `k` pairs in list order.
    pub fn prefix(&self, k: usize) -> KeypointSet {
        KeypointSet {
            pairs: self.pairs[..k.min(self.pairs.len())].to_vec(),
            image_size_camera: self.image_size_camera,
            image_size_twin: self.image_size_twin,
        }
    }

    pub(crate) fn camera_coords(&self) -> Vec<[f64; 2]> {
        self.pairs.iter().map(|p| p.camera.xy()).collect()
    }

    pub(crate) fn twin_coords(&self) -> Vec<[f64; 2]> {
        self.pairs.iter().map(|p| p.twin.xy()).collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self, GeometryError> {
        let file: KeypointFile =
            serde_json::from_str(text).map_err(|e| GeometryError::KeypointFile(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&KeypointFile::from(self)).expect("keypoint file serializes")
    }

    pub fn load(path: &Path) -> Result<Self, GeometryError> {
        let text = fs::read_to_string(path)
            .map_err(|e| GeometryError::KeypointFile(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), GeometryError> {
        fs::write(path, self.to_json_string() + "\n")
            .map_err(|e| GeometryError::KeypointFile(format!("{}: {e}", path.display())))
    }
}

/// On-disk keypoints document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeypointFile {
    pub image_size_camera: [u32; 2],
    pub image_size_twin: [u32; 2],
    pub pairs: Vec<KeypointFilePair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeypointFilePair {
    pub camera: [f64; 2],
    pub twin: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl From<&KeypointSet> for KeypointFile {
    fn from(set: &KeypointSet) -> Self {
        KeypointFile {
            image_size_camera: set.image_size_camera.into(),
            image_size_twin: set.image_size_twin.into(),
            pairs: set
                .pairs
                .iter()
                .map(|p| KeypointFilePair {
                    camera: p.camera.xy(),
                    twin: p.twin.xy(),
                    label: p.label.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<KeypointFile> for KeypointSet {
    type Error = GeometryError;

    fn try_from(file: KeypointFile) -> Result<Self, Self::Error> {
        let pairs = file
            .pairs
            .into_iter()
            .map(|p| {
                KeypointPair::new(
                    Point2::camera(p.camera[0], p.camera[1])?,
                    Point2::twin(p.twin[0], p.twin[1])?,
                    p.label,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        KeypointSet::new(file.image_size_camera.into(), file.image_size_twin.into(), pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size() -> ImageSize {
        ImageSize::new(100, 100)
    }

    #[test]
    fn rejects_out_of_bounds_and_duplicates() {
        let mut set = KeypointSet::empty(size(), size()).unwrap();
        set.push(KeypointPair::from_coords([1.0, 1.0], [2.0, 2.0]).unwrap())
            .unwrap();
        let err = set
            .push(KeypointPair::from_coords([-5.0, 1.0], [2.0, 2.0]).unwrap())
            .unwrap_err();
        assert!(matches!(
            err,
            GeometryError::OutOfBounds {
                frame: Frame::Camera,
                ..
            }
        ));
        let err = set
            .push(KeypointPair::from_coords([1.0, 1.0], [9.0, 9.0]).unwrap())
            .unwrap_err();
        assert!(matches!(
            err,
            GeometryError::DuplicateCameraPoint { first: 0, second: 1 }
        ));
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn pair_frames_are_checked() {
        let c = Point2::camera(0.0, 0.0).unwrap();
        assert!(KeypointPair::new(c, c, None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"image_size_camera":[640,480],"image_size_twin":[300,200],
            "pairs":[{"camera":[10.5,20],"twin":[1,2],"label":"corner"},{"camera":[30,40],"twin":[3,4]}]}"#;
        let set = KeypointSet::from_json_str(text).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.pairs()[0].label.as_deref(), Some("corner"));
        let again = KeypointSet::from_json_str(&set.to_json_string()).unwrap();
        assert_eq!(set, again);
    }

    #[test]
    fn unknown_keys_in_file_are_rejected() {
        let text = r#"{"image_size_camera":[1,1],"image_size_twin":[1,1],"pairs":[],"extra":1}"#;
        assert!(matches!(
            KeypointSet::from_json_str(text),
            Err(GeometryError::KeypointFile(_))
        ));
    }
}
