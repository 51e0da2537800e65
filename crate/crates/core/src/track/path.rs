use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mask::{Mask, NEIGHBOURS};
use super::TrackError;
use crate::geometry::{Frame, Point2};

/// Ordered route in twin pixels.
///
/// A closed path does not repeat its first point; the closing segment from
/// the last point back to the first is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    points: Vec<Point2>,
    closed: bool,
    arc_length: f64,
}

impl ReferencePath {
    pub fn new(mut points: Vec<Point2>, closed: bool) -> Result<Self, TrackError> {
        for p in &points {
            p.expect_frame(Frame::Twin)?;
        }
        if closed && points.len() > 2 && points.first().map(Point2::xy) == points.last().map(Point2::xy) {
            points.pop();
        }
        if points.len() < 2 {
            return Err(TrackError::DegeneratePath(format!(
                "{} point(s); need at least 2",
                points.len()
            )));
        }
        if let Some(i) = points.windows(2).position(|w| w[0].xy() == w[1].xy()) {
            return Err(TrackError::DegeneratePath(format!(
                "points {i} and {} coincide",
                i + 1
            )));
        }
        let mut path = Self {
            points,
            closed,
            arc_length: 0.0,
        };
        path.arc_length = path.segments().map(|(a, b)| dist(a, b)).sum();
        Ok(path)
    }

    pub fn from_coords(coords: &[[f64; 2]], closed: bool) -> Result<Self, TrackError> {
        let points = coords
            .iter()
            .map(|c| Point2::twin(c[0], c[1]))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(points, closed)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn coords(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(Point2::xy).collect()
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Polyline segments, including the closing one for closed paths.
    pub fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (self.points[i].xy(), self.points[(i + 1) % n].xy()))
    }

    /// Same route traversed the other way. Closed paths keep their first
    /// point.
    pub fn reversed(&self) -> ReferencePath {
        let mut points = self.points.clone();
        if self.closed {
            points[1..].reverse();
        } else {
            points.reverse();
        }
        ReferencePath {
            points,
            closed: self.closed,
            arc_length: self.arc_length,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, TrackError> {
        let file: ReferencePathFile =
            serde_json::from_str(text).map_err(|e| TrackError::PathFile(e.to_string()))?;
        Self::from_coords(&file.points, file.closed)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&ReferencePathFile {
            closed: self.closed,
            points: self.coords(),
        })
        .expect("path serializes")
    }

    pub fn load(path: &Path) -> Result<Self, TrackError> {
        let text = fs::read_to_string(path)
            .map_err(|e| TrackError::PathFile(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), TrackError> {
        fs::write(path, self.to_json_string() + "\n")
            .map_err(|e| TrackError::PathFile(format!("{}: {e}", path.display())))
    }
}

/// On-disk reference path: `{"closed":bool,"points":[[x,y],...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePathFile {
    pub closed: bool,
    pub points: Vec<[f64; 2]>,
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Orders the pixels of a single-curve skeleton.
///
/// Open curves start at the endpoint with the smallest `(y, x)`. Closed loops
/// start at the smallest `(y, x)` pixel and leave toward the neighbour with
/// the smaller angle `atan2(dy, dx)` measured in image coordinates.
pub fn trace_path(skeleton: &Mask) -> Result<ReferencePath, TrackError> {
    let components = skeleton.components();
    match components.len() {
        0 => return Err(TrackError::DegeneratePath("skeleton is empty".into())),
        1 => {}
        n => return Err(TrackError::DisconnectedSkeleton { components: n }),
    }
    let branches: Vec<(u32, u32)> = skeleton
        .pixels()
        .filter(|&(x, y)| skeleton.neighbour_count(x, y) >= 3)
        .collect();
    if !branches.is_empty() {
        return Err(TrackError::BranchingSkeleton { pixels: branches });
    }
    let total = skeleton.count();
    if total < 2 {
        return Err(TrackError::DegeneratePath("single-pixel skeleton".into()));
    }

    let neighbours = |x: u32, y: u32| -> Vec<(u32, u32)> {
        NEIGHBOURS
            .iter()
            .map(|(dx, dy)| (x as i64 + dx, y as i64 + dy))
            .filter(|&(nx, ny)| skeleton.get(nx, ny))
            .map(|(nx, ny)| (nx as u32, ny as u32))
            .collect()
    };

    // row-major order is (y, x) lexicographic
    let endpoint = skeleton
        .pixels()
        .find(|&(x, y)| skeleton.neighbour_count(x, y) == 1);
    let closed = endpoint.is_none();
    let start = endpoint.unwrap_or_else(|| skeleton.pixels().next().expect("non-empty"));

    let mut visited = std::collections::HashSet::with_capacity(total);
    let mut order = vec![start];
    visited.insert(start);
    let mut current = start;
    if closed {
        let angle = |&(nx, ny): &(u32, u32)| {
            (ny as f64 - start.1 as f64).atan2(nx as f64 - start.0 as f64)
        };
        let first = neighbours(start.0, start.1)
            .into_iter()
            .min_by(|a, b| angle(a).total_cmp(&angle(b)))
            .expect("loop pixel has two neighbours");
        visited.insert(first);
        order.push(first);
        current = first;
    }
    while let Some(next) = neighbours(current.0, current.1)
        .into_iter()
        .find(|n| !visited.contains(n))
    {
        visited.insert(next);
        order.push(next);
        current = next;
    }
    debug_assert_eq!(order.len(), total);

    let points = order
        .into_iter()
        .map(|(x, y)| Point2::from_raw(x as f64, y as f64, Frame::Twin))
        .collect();
    ReferencePath::new(points, closed)
}

/// Places `count` points at equal arc-length spacing along `path`.
///
/// Open paths keep both endpoints. Closed paths are sampled at
/// `k * L / count`, so the spacing is uniform across the wrap-around.
pub fn resample(path: &ReferencePath, count: usize) -> Result<ReferencePath, TrackError> {
    if count < 2 {
        return Err(TrackError::InvalidCount(count));
    }
    let mut vertices = path.coords();
    if path.closed {
        vertices.push(vertices[0]);
    }
    let mut cumulative = Vec::with_capacity(vertices.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in vertices.windows(2) {
        acc += dist(w[0], w[1]);
        cumulative.push(acc);
    }
    let total = acc;
    let step = if path.closed {
        total / count as f64
    } else {
        total / (count - 1) as f64
    };

    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let s = if !path.closed && k == count - 1 {
            total
        } else {
            step * k as f64
        };
        while seg + 2 < cumulative.len() && cumulative[seg + 1] < s {
            seg += 1;
        }
        let (a, b) = (vertices[seg], vertices[seg + 1]);
        let len = cumulative[seg + 1] - cumulative[seg];
        let t = if len > 0.0 {
            ((s - cumulative[seg]) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        out.push(Point2::from_raw(p[0], p[1], Frame::Twin));
    }
    ReferencePath::new(out, path.closed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_pixel_segment_left_to_right() {
        let m = Mask::from_ascii(&[".......", ".#####.", "......."]);
        let p = trace_path(&m).unwrap();
        assert!(!p.closed());
        let xs: Vec<f64> = p.points().iter().map(|q| q.x()).collect();
        assert_eq!(xs, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn open_curve_starts_at_smallest_endpoint() {
        let m = Mask::from_ascii(&["....#", "...#.", "..#..", ".#...", "#...."]);
        let p = trace_path(&m).unwrap();
        assert_eq!(p.points()[0].xy(), [4.0, 0.0]);
        assert_eq!(p.points()[4].xy(), [0.0, 4.0]);
    }

    #[test]
    fn t_shape_is_branching() {
        let m = Mask::from_ascii(&[".......", ".#####.", "...#...", "...#...", "......."]);
        match trace_path(&m) {
            Err(TrackError::BranchingSkeleton { pixels }) => assert!(pixels.contains(&(3, 1))),
            other => panic!("expected branching, got {other:?}"),
        }
    }

    #[test]
    fn two_pieces_are_disconnected() {
        let m = Mask::from_ascii(&["##...", ".....", "...##"]);
        assert!(matches!(
            trace_path(&m),
            Err(TrackError::DisconnectedSkeleton { components: 2 })
        ));
    }

    #[test]
    fn closed_loop_direction() {
        // diamond: start (2,0), neighbours (3,1) at 45° and (1,1) at 135°
        let m = Mask::from_ascii(&["..#..", ".#.#.", "#...#", ".#.#.", "..#.."]);
        let p = trace_path(&m).unwrap();
        assert!(p.closed());
        assert_eq!(p.len(), 8);
        assert_eq!(p.points()[0].xy(), [2.0, 0.0]);
        assert_eq!(p.points()[1].xy(), [3.0, 1.0]);
    }

    #[test]
    fn resample_straight_segment() {
        let p = ReferencePath::from_coords(&[[0.0, 0.0], [0.0, 10.0]], false).unwrap();
        let r = resample(&p, 3).unwrap();
        assert_eq!(r.coords(), vec![[0.0, 0.0], [0.0, 5.0], [0.0, 10.0]]);
        assert_eq!(r.arc_length(), 10.0);
    }

    #[test]
    fn resample_unit_square() {
        let p = ReferencePath::from_coords(
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            true,
        )
        .unwrap();
        let r = resample(&p, 8).unwrap();
        assert_eq!(r.len(), 8);
        let expected = [
            [0.0, 0.0],
            [0.5, 0.0],
            [1.0, 0.0],
            [1.0, 0.5],
            [1.0, 1.0],
            [0.5, 1.0],
            [0.0, 1.0],
            [0.0, 0.5],
        ];
        for (got, want) in r.coords().iter().zip(expected) {
            assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
        }
        // perimeter units: 4 / 8
        for (a, b) in r.segments() {
            assert!((dist(a, b) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_rejects_tiny_count() {
        let p = ReferencePath::from_coords(&[[0.0, 0.0], [0.0, 10.0]], false).unwrap();
        assert!(matches!(resample(&p, 1), Err(TrackError::InvalidCount(1))));
    }

    #[test]
    fn path_validation_and_json() {
        assert!(ReferencePath::from_coords(&[[0.0, 0.0]], false).is_err());
        assert!(ReferencePath::from_coords(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], false).is_err());
        let p = ReferencePath::from_coords(&[[0.0, 0.0], [3.0, 4.0], [0.0, 0.0]], true).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.arc_length(), 10.0);
        let text = p.to_json_string();
        assert_eq!(text, r#"{"closed":true,"points":[[0.0,0.0],[3.0,4.0]]}"#);
        assert_eq!(ReferencePath::from_json_str(&text).unwrap(), p);
    }

    #[test]
    fn reversed_keeps_closed_start() {
        let p = ReferencePath::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], true).unwrap();
        assert_eq!(p.reversed().coords(), vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0]]);
        let o = ReferencePath::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], false).unwrap();
        assert_eq!(o.reversed().coords()[0], [1.0, 1.0]);
    }
}
