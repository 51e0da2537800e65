use super::{MetricKind, MetricsError, PathDistanceResult, SimilarityConfig};
use crate::geometry::{GeometryError, Point2};

/// DP cell for DTW: accumulated cost, warping-path length and whether any
/// step on that path was clamped. Ordered lexicographically, `false < true`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cell {
    cost: f64,
    len: usize,
    clamped: bool,
}

impl Cell {
    fn better_than(&self, other: &Cell) -> bool {
        (self.cost, self.len, self.clamped) < (other.cost, other.len, other.clamped)
    }
}

fn coords(x: &[Point2], y: &[Point2]) -> Result<(Vec<[f64; 2]>, Vec<[f64; 2]>), MetricsError> {
    let (Some(fx), Some(fy)) = (x.first(), y.first()) else {
        return Err(MetricsError::EmptySequence);
    };
    if fx.frame() != fy.frame() {
        return Err(GeometryError::FrameMismatch {
            expected: fx.frame(),
            found: fy.frame(),
        }
        .into());
    }
    crate::geometry::ensure_frame(x, fx.frame())?;
    crate::geometry::ensure_frame(y, fx.frame())?;
    Ok((x.iter().map(Point2::xy).collect(), y.iter().map(Point2::xy).collect()))
}

fn local(a: [f64; 2], b: [f64; 2], clamp: Option<f64>) -> (f64, bool) {
    let raw = (a[0] - b[0]).hypot(a[1] - b[1]);
    match clamp {
        Some(delta) if raw > delta => (delta, true),
        _ => (raw, false),
    }
}

/// Dynamic time warping aggregated as mean cost per warping step.
///
/// Among warping paths of equal accumulated cost the shorter one wins.
pub fn dtw_distance(x: &[Point2], y: &[Point2], clamp_delta: Option<f64>) -> Result<PathDistanceResult, MetricsError> {
    let (x, y) = coords(x, y)?;
    Ok(dtw_coords(&x, &y, clamp_delta))
}

pub(crate) fn dtw_coords(x: &[[f64; 2]], y: &[[f64; 2]], clamp: Option<f64>) -> PathDistanceResult {
    let m = y.len();
    let mut prev: Vec<Cell> = Vec::with_capacity(m);
    let mut row: Vec<Cell> = Vec::with_capacity(m);
    for (i, &xi) in x.iter().enumerate() {
        row.clear();
        for (j, &yj) in y.iter().enumerate() {
            let (c, was_clamped) = local(xi, yj, clamp);
            let step = |p: &Cell| Cell {
                cost: p.cost + c,
                len: p.len + 1,
                clamped: p.clamped || was_clamped,
            };
            let cell = if i == 0 && j == 0 {
                Cell {
                    cost: c,
                    len: 1,
                    clamped: was_clamped,
                }
            } else {
                // diagonal, up, left
                let candidates = [
                    (i > 0 && j > 0).then(|| step(&prev[j - 1])),
                    (i > 0).then(|| step(&prev[j])),
                    (j > 0).then(|| step(&row[j - 1])),
                ];
                candidates
                    .into_iter()
                    .flatten()
                    .reduce(|best, c| if c.better_than(&best) { c } else { best })
                    .expect("at least one predecessor")
            };
            row.push(cell);
        }
        std::mem::swap(&mut prev, &mut row);
    }
    let last = prev[m - 1];
    PathDistanceResult {
        distance: last.cost / last.len as f64,
        metric: MetricKind::Dtw,
        clamped: last.clamped,
    }
}

/// Discrete Fréchet distance.
///
/// Clamping every local distance at `δ` clamps the result at `δ` as well, so
/// the recurrence runs on raw distances and `clamped` reports whether the
/// raw value exceeded `δ`.
pub fn frechet_distance(x: &[Point2], y: &[Point2], clamp_delta: Option<f64>) -> Result<PathDistanceResult, MetricsError> {
    let (x, y) = coords(x, y)?;
    Ok(frechet_coords(&x, &y, clamp_delta))
}

pub(crate) fn frechet_coords(x: &[[f64; 2]], y: &[[f64; 2]], clamp: Option<f64>) -> PathDistanceResult {
    let m = y.len();
    let mut prev = vec![0.0f64; m];
    let mut row = vec![0.0f64; m];
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let d = (xi[0] - yj[0]).hypot(xi[1] - yj[1]);
            let reach = match (i, j) {
                (0, 0) => d,
                (0, _) => row[j - 1],
                (_, 0) => prev[j],
                _ => prev[j - 1].min(prev[j]).min(row[j - 1]),
            };
            row[j] = d.max(reach);
        }
        std::mem::swap(&mut prev, &mut row);
    }
    let raw = prev[m - 1];
    let (distance, clamped) = match clamp {
        Some(delta) if raw > delta => (delta, true),
        _ => (raw, false),
    };
    PathDistanceResult {
        distance,
        metric: MetricKind::Frechet,
        clamped,
    }
}

/// Distance under the configured metric and clamp.
pub fn path_distance(x: &[Point2], y: &[Point2], config: &SimilarityConfig) -> Result<PathDistanceResult, MetricsError> {
    match config.metric {
        MetricKind::Dtw => dtw_distance(x, y, config.clamp_delta),
        MetricKind::Frechet => frechet_distance(x, y, config.clamp_delta),
    }
}
