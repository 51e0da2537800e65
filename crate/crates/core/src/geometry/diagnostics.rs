use serde::{Deserialize, Serialize};

use super::homography::{affine_from_three, dlt, map_raw, normalize_for_eval};
use super::{estimate_homography, GeometryError, Homography, KeypointSet};

/// Reprojection errors of a set of check points, in twin pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationDiagnostics {
    pub average_error: f64,
    pub accumulated_error: f64,
    pub per_point_errors: Vec<f64>,
    pub keypoint_count: usize,
}

impl CalibrationDiagnostics {
    pub fn from_errors(per_point_errors: Vec<f64>) -> Self {
        let accumulated_error: f64 = per_point_errors.iter().sum();
        let keypoint_count = per_point_errors.len();
        Self {
            average_error: accumulated_error / keypoint_count as f64,
            accumulated_error,
            per_point_errors,
            keypoint_count,
        }
    }
}

/// Distance between each mapped camera point and its stated twin point.
pub fn reprojection_diagnostics(
    h: &Homography,
    check_points: &KeypointSet,
) -> Result<CalibrationDiagnostics, GeometryError> {
    if check_points.is_empty() {
        return Err(GeometryError::TooFewPoints {
            required: 1,
            found: 0,
        });
    }
    let errors = check_points
        .pairs()
        .iter()
        .map(|pair| h.apply(pair.camera)?.distance(&pair.twin))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CalibrationDiagnostics::from_errors(errors))
}

/// One row of the error-vs-keypoint-count curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurvePoint {
    pub keypoint_count: usize,
    /// Held-out errors: pair `i` scored against a fit to the other pairs.
    pub leave_one_out: CalibrationDiagnostics,
    /// Errors of the fit on all `keypoint_count` pairs against those pairs.
    pub in_sample: CalibrationDiagnostics,
}

/// Leave-one-out errors over the first `k` pairs for every `k` from
/// `min_count` to the set size.
///
/// With four pairs the three remaining pairs cannot determine a projective
/// map, so the held-out pair is scored against the exact affine map through
/// them.
pub fn keypoint_error_curve(
    keypoints: &KeypointSet,
    min_count: usize,
) -> Result<Vec<ErrorCurvePoint>, GeometryError> {
    let required = min_count.max(4);
    if min_count < 4 || keypoints.len() < required {
        return Err(GeometryError::TooFewPoints {
            required,
            found: if min_count < 4 { min_count } else { keypoints.len() },
        });
    }
    (required..=keypoints.len())
        .map(|k| {
            let subset = keypoints.prefix(k);
            let fit = estimate_homography(&subset)?;
            Ok(ErrorCurvePoint {
                keypoint_count: k,
                leave_one_out: leave_one_out(&subset)?,
                in_sample: reprojection_diagnostics(&fit, &subset)?,
            })
        })
        .collect()
}

/// Leave-one-out diagnostics over every pair of `keypoints` (at least 4).
pub fn leave_one_out(keypoints: &KeypointSet) -> Result<CalibrationDiagnostics, GeometryError> {
    let cam = keypoints.camera_coords();
    let twin = keypoints.twin_coords();
    let n = cam.len();
    if n < 4 {
        return Err(GeometryError::TooFewPoints {
            required: 4,
            found: n,
        });
    }
    let errors = (0..n)
        .map(|held| {
            let src: Vec<_> = (0..n).filter(|&i| i != held).map(|i| cam[i]).collect();
            let dst: Vec<_> = (0..n).filter(|&i| i != held).map(|i| twin[i]).collect();
            let m = if src.len() >= 4 {
                normalize_for_eval(dlt(&src, &dst)?)
            } else {
                affine_from_three(&src, &dst)?
            };
            let [x, y] = map_raw(&m, cam[held]).ok_or(GeometryError::PointAtInfinity {
                x: cam[held][0],
                y: cam[held][1],
            })?;
            Ok((x - twin[held][0]).hypot(y - twin[held][1]))
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    Ok(CalibrationDiagnostics::from_errors(errors))
}
