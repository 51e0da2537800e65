use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{Frame, GeometryError, KeypointSet, Point2};

/// Minimum determinant magnitude of a normalized matrix.
pub const MIN_DETERMINANT: f64 = 1e-12;
/// Minimum magnitude of the homogeneous scale of a mapped point.
pub const MIN_SCALE: f64 = 1e-12;
/// Largest accepted ratio between the largest and the second-smallest
/// singular value of the stacked DLT system. Beyond it the solution space is
/// effectively more than one-dimensional.
pub const MAX_CONDITION: f64 = 1e8;

/// A normalized 3x3 projective map between two frames.
///
/// Normalization: Frobenius norm 1 and a non-negative bottom-right entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    matrix: Matrix3<f64>,
    source: Frame,
    target: Frame,
}

impl Homography {
    /// Normalizes `matrix` and checks invertibility.
    pub fn from_matrix(matrix: Matrix3<f64>, source: Frame, target: Frame) -> Result<Self, GeometryError> {
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::DegenerateConfiguration(
                "matrix has non-finite entries".into(),
            ));
        }
        let matrix = normalize_matrix(matrix).ok_or_else(|| {
            GeometryError::DegenerateConfiguration("matrix is zero".into())
        })?;
        let det = matrix.determinant();
        if det.abs() <= MIN_DETERMINANT {
            return Err(GeometryError::DegenerateConfiguration(format!(
                "normalized determinant {det:e} is not invertible"
            )));
        }
        Ok(Self {
            matrix,
            source,
            target,
        })
    }

    /// Camera -> twin map from row-major entries.
    pub fn camera_to_twin(rows: [[f64; 3]; 3]) -> Result<Self, GeometryError> {
        Self::from_matrix(Matrix3::from_row_slice(&rows.concat()), Frame::Camera, Frame::Twin)
    }

    pub fn identity(source: Frame, target: Frame) -> Self {
        Self::from_matrix(Matrix3::identity(), source, target).expect("identity is invertible")
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.matrix;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn source(&self) -> Frame {
        self.source
    }

    pub fn target(&self) -> Frame {
        self.target
    }

    /// Maps `p` (which must be in the source frame) by perspective division.
    pub fn apply(&self, p: Point2) -> Result<Point2, GeometryError> {
        p.expect_frame(self.source)?;
        let [x, y] = map_raw(&self.matrix, p.xy())
            .ok_or(GeometryError::PointAtInfinity { x: p.x(), y: p.y() })?;
        Point2::new(x, y, self.target)
    }

    pub fn inverse(&self) -> Homography {
        let inv = self
            .matrix
            .try_inverse()
            .expect("determinant checked at construction");
        Self::from_matrix(inv, self.target, self.source).expect("inverse of invertible map")
    }

    /// Largest absolute entry difference between two normalized matrices.
    pub fn max_entry_deviation(&self, other: &Homography) -> f64 {
        (self.matrix - other.matrix).abs().max()
    }

    /// Composition `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Homography) -> Result<Homography, GeometryError> {
        if other.source != self.target {
            return Err(GeometryError::FrameMismatch {
                expected: self.target,
                found: other.source,
            });
        }
        Self::from_matrix(other.matrix * self.matrix, self.source, other.target)
    }
}

impl Serialize for Homography {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        HomographyRepr {
            source: self.source,
            target: self.target,
            matrix: self.rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Homography {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = HomographyRepr::deserialize(deserializer)?;
        Homography::from_matrix(
            Matrix3::from_row_slice(&repr.matrix.concat()),
            repr.source,
            repr.target,
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct HomographyRepr {
    source: Frame,
    target: Frame,
    matrix: [[f64; 3]; 3],
}

/// Frobenius norm 1, bottom-right entry >= 0 (first non-zero entry positive
/// when the bottom-right entry is exactly zero).
fn normalize_matrix(m: Matrix3<f64>) -> Option<Matrix3<f64>> {
    let norm = m.norm();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    // Already-normalized input is kept bit-for-bit.
    let mut m = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
        m
    } else {
        m / norm
    };
    let pivot = if m[(2, 2)] != 0.0 {
        m[(2, 2)]
    } else {
        // row-major scan
        (0..9).map(|i| m[(i / 3, i % 3)]).find(|v| *v != 0.0)?
    };
    if pivot < 0.0 {
        m = -m;
    }
    Some(m)
}

/// Normalized copy of a raw solver output, used for held-out scoring.
pub(crate) fn normalize_for_eval(m: Matrix3<f64>) -> Matrix3<f64> {
    normalize_matrix(m).unwrap_or(m)
}

pub(crate) fn map_raw(m: &Matrix3<f64>, [x, y]: [f64; 2]) -> Option<[f64; 2]> {
    let q = m * Vector3::new(x, y, 1.0);
    if q.z.abs() <= MIN_SCALE {
        return None;
    }
    let out = [q.x / q.z, q.y / q.z];
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Estimates the camera -> twin map by normalized DLT.
///
/// Both point sets are shifted to zero centroid and scaled to RMS radius √2;
/// the solution is the right singular vector of the smallest singular value
/// of the stacked `2n x 9` system.
pub fn estimate_homography(keypoints: &KeypointSet) -> Result<Homography, GeometryError> {
    let m = dlt(&keypoints.camera_coords(), &keypoints.twin_coords())?;
    Homography::from_matrix(m, Frame::Camera, Frame::Twin)
}

pub fn apply_homography(h: &Homography, p: Point2) -> Result<Point2, GeometryError> {
    h.apply(p)
}

/// Raw DLT solve from `src` to `dst`; returns an unnormalized matrix.
pub(crate) fn dlt(src: &[[f64; 2]], dst: &[[f64; 2]]) -> Result<Matrix3<f64>, GeometryError> {
    assert_eq!(src.len(), dst.len());
    let n = src.len();
    if n < 4 {
        return Err(GeometryError::TooFewPoints {
            required: 4,
            found: n,
        });
    }
    if n == 4 {
        for pts in [src, dst] {
            if let Some(triple) = collinear_triple(pts) {
                return Err(GeometryError::DegenerateConfiguration(format!(
                    "points {triple:?} are collinear; add keypoints"
                )));
            }
        }
    }
    let t_src = normalizing_transform(src)?;
    let t_dst = normalizing_transform(dst)?;

    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, (s, d)) in src.iter().zip(dst).enumerate() {
        let [x, y] = apply_affine(&t_src, *s);
        let [u, v] = apply_affine(&t_dst, *d);
        let r = 2 * i;
        a.row_mut(r)
            .copy_from_slice(&[-x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u]);
        a.row_mut(r + 1)
            .copy_from_slice(&[0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v]);
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let largest = svd.singular_values[order[0]];
    let second_smallest = svd.singular_values[order[7]];
    if largest == 0.0 || second_smallest == 0.0 || largest / second_smallest > MAX_CONDITION {
        return Err(GeometryError::DegenerateConfiguration(format!(
            "correspondence system is rank deficient (condition {:e}); add keypoints",
            largest / second_smallest
        )));
    }
    let h = v_t.row(order[8]);
    let h_norm = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);
    let t_dst_inv = t_dst
        .try_inverse()
        .expect("normalizing transform is invertible");
    Ok(t_dst_inv * h_norm * t_src)
}

/// Exact affine map from three correspondences (last row `0 0 1`).
pub(crate) fn affine_from_three(src: &[[f64; 2]], dst: &[[f64; 2]]) -> Result<Matrix3<f64>, GeometryError> {
    assert!(src.len() == 3 && dst.len() == 3);
    let m = Matrix3::new(
        src[0][0], src[0][1], 1.0, src[1][0], src[1][1], 1.0, src[2][0], src[2][1], 1.0,
    );
    let lu = m.lu();
    let solve = |coord: usize| {
        lu.solve(&Vector3::new(dst[0][coord], dst[1][coord], dst[2][coord]))
            .ok_or_else(|| GeometryError::DegenerateConfiguration("collinear affine triple".into()))
    };
    let row_x = solve(0)?;
    let row_y = solve(1)?;
    Ok(Matrix3::new(
        row_x[0], row_x[1], row_x[2], row_y[0], row_y[1], row_y[2], 0.0, 0.0, 1.0,
    ))
}

/// Similarity transform taking `pts` to centroid 0 and RMS radius √2.
fn normalizing_transform(pts: &[[f64; 2]]) -> Result<Matrix3<f64>, GeometryError> {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let mean_sq = pts
        .iter()
        .map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2))
        .sum::<f64>()
        / n;
    if mean_sq <= 0.0 {
        return Err(GeometryError::DegenerateConfiguration(
            "all points coincide".into(),
        ));
    }
    let s = std::f64::consts::SQRT_2 / mean_sq.sqrt();
    Ok(Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0))
}

fn apply_affine(t: &Matrix3<f64>, [x, y]: [f64; 2]) -> [f64; 2] {
    [
        t[(0, 0)] * x + t[(0, 1)] * y + t[(0, 2)],
        t[(1, 0)] * x + t[(1, 1)] * y + t[(1, 2)],
    ]
}

/// First index triple whose triangle is flat relative to its extent.
fn collinear_triple(pts: &[[f64; 2]]) -> Option<[usize; 3]> {
    const REL_TOL: f64 = 1e-9;
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (pts[i], pts[j], pts[k]);
                let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
                let scale = [(a, b), (b, c), (a, c)]
                    .iter()
                    .map(|(p, q)| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2))
                    .fold(0.0, f64::max);
                if cross.abs() <= REL_TOL * scale {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}
