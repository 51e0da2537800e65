use std::fmt;

use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Coordinate frame a point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Pixels of the overhead camera image.
    Camera,
    /// Pixels of the digital-twin track image.
    Twin,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Camera => f.write_str("camera"),
            Frame::Twin => f.write_str("twin"),
        }
    }
}

/// A finite 2-D pixel position tagged with its frame.
///
/// Origin is the top-left corner, y grows downward. Integer coordinates are
/// pixel centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    x: f64,
    y: f64,
    frame: Frame,
}

impl Point2 {
    pub fn new(x: f64, y: f64, frame: Frame) -> Result<Self, GeometryError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(GeometryError::NonFinite { x, y });
        }
        Ok(Self { x, y, frame })
    }

    pub fn camera(x: f64, y: f64) -> Result<Self, GeometryError> {
        Self::new(x, y, Frame::Camera)
    }

    pub fn twin(x: f64, y: f64) -> Result<Self, GeometryError> {
        Self::new(x, y, Frame::Twin)
    }

    /// Caller guarantees finiteness.
    pub(crate) fn from_raw(x: f64, y: f64, frame: Frame) -> Self {
        debug_assert!(x.is_finite() && y.is_finite());
        Self { x, y, frame }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    /// Euclidean distance; both points must share a frame.
    pub fn distance(&self, other: &Point2) -> Result<f64, GeometryError> {
        self.expect_frame(other.frame)?;
        Ok((self.x - other.x).hypot(self.y - other.y))
    }

    pub fn expect_frame(&self, frame: Frame) -> Result<(), GeometryError> {
        if self.frame != frame {
            return Err(GeometryError::FrameMismatch {
                expected: frame,
                found: self.frame,
            });
        }
        Ok(())
    }
}

/// Checks that every point in `points` is in `frame`.
pub fn ensure_frame(points: &[Point2], frame: Frame) -> Result<(), GeometryError> {
    points.iter().try_for_each(|p| p.expect_frame(frame))
}
