use serde::{Deserialize, Serialize};

use super::{FailureEvent, FailureKind, MetricsError};
use crate::detection::Trajectory;
use crate::geometry::{Frame, GeometryError, Point2};

/// Finish line segment in twin pixels. Crossings closer in time than
/// `min_crossing_interval` to the previously accepted one are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartLine {
    pub a: Point2,
    pub b: Point2,
    pub min_crossing_interval: f64,
}

impl StartLine {
    pub fn new(a: Point2, b: Point2, min_crossing_interval: f64) -> Result<Self, MetricsError> {
        a.expect_frame(Frame::Twin)?;
        b.expect_frame(Frame::Twin)?;
        if a.xy() == b.xy() {
            return Err(MetricsError::InvalidConfig("start line endpoints coincide".into()));
        }
        if !(min_crossing_interval.is_finite() && min_crossing_interval >= 0.0) {
            return Err(MetricsError::InvalidConfig(format!(
                "min_crossing_interval must be >= 0, got {min_crossing_interval}"
            )));
        }
        Ok(Self {
            a,
            b,
            min_crossing_interval,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingDirection {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub time: f64,
    pub direction: CrossingDirection,
    /// Index of the sample before the crossing.
    pub sample_index: usize,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Start-line crossings in time order.
///
/// A step crosses when its endpoints lie on different sides of the line
/// through `a`-`b` and the step's segment meets segment `a`-`b`. A sample
/// lying exactly on the line counts as the negative side, so touching the
/// line once from either side yields a single crossing rather than none.
/// Forward means the motion has a positive cross product with `b - a`.
pub fn detect_crossings(t: &Trajectory, line: &StartLine) -> Result<Vec<Crossing>, MetricsError> {
    if t.len() < 2 {
        return Err(MetricsError::TooFewSamples(t.len()));
    }
    if t.frame() != Frame::Twin {
        return Err(GeometryError::FrameMismatch {
            expected: Frame::Twin,
            found: t.frame(),
        }
        .into());
    }
    let (a, b) = (line.a.xy(), line.b.xy());
    let mut out: Vec<Crossing> = Vec::new();
    for (k, w) in t.samples().windows(2).enumerate() {
        let (p, q) = (w[0].point.xy(), w[1].point.xy());
        let (o1, o2) = (cross(a, b, p), cross(a, b, q));
        if (o1 > 0.0) == (o2 > 0.0) {
            continue;
        }
        let (o3, o4) = (cross(p, q, a), cross(p, q, b));
        if (o3 > 0.0 && o4 > 0.0) || (o3 < 0.0 && o4 < 0.0) {
            continue;
        }
        let frac = o1 / (o1 - o2);
        let time = w[0].time + (w[1].time - w[0].time) * frac;
        if let Some(last) = out.last() {
            if time - last.time < line.min_crossing_interval {
                continue;
            }
        }
        let direction = if o2 > o1 {
            CrossingDirection::Forward
        } else {
            CrossingDirection::Backward
        };
        out.push(Crossing {
            time,
            direction,
            sample_index: k,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub completion_seconds: Option<f64>,
    /// Crossings that open and close the timed run, when it completed.
    pub first: Option<Crossing>,
    pub last: Option<Crossing>,
    pub events: Vec<FailureEvent>,
}

/// Time from the first crossing to the `required_laps`-th later crossing in
/// the same direction. Falls back to a did-not-finish event.
pub fn completion_time(crossings: &[Crossing], required_laps: usize) -> Completion {
    let same: Vec<&Crossing> = match crossings.first() {
        Some(first) => crossings.iter().filter(|c| c.direction == first.direction).collect(),
        None => Vec::new(),
    };
    if required_laps >= 1 && same.len() > required_laps {
        let (first, last) = (*same[0], *same[required_laps]);
        return Completion {
            completion_seconds: Some(last.time - first.time),
            first: Some(first),
            last: Some(last),
            events: Vec::new(),
        };
    }
    let laps_done = same.len().saturating_sub(1);
    Completion {
        completion_seconds: None,
        first: crossings.first().copied(),
        last: None,
        events: vec![FailureEvent {
            time: crossings.last().map_or(0.0, |c| c.time),
            kind: FailureKind::DidNotFinish,
            detail: format!(
                "{laps_done} of {required_laps} laps completed ({} start-line crossings)",
                crossings.len()
            ),
            duration_seconds: None,
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(fps: f64, pts: &[(u64, [f64; 2])]) -> Trajectory {
        Trajectory::from_frames(
            Frame::Twin,
            fps,
            pts.iter().map(|&(f, p)| (f, Point2::twin(p[0], p[1]).unwrap())).collect(),
        )
        .unwrap()
    }

    fn line(interval: f64) -> StartLine {
        StartLine::new(Point2::twin(-1.0, 0.0).unwrap(), Point2::twin(1.0, 0.0).unwrap(), interval).unwrap()
    }

    #[test]
    fn midpoint_crossing() {
        let t = traj(1.0, &[(0, [0.0, -1.0]), (1, [0.0, 1.0])]);
        let c = detect_crossings(&t, &line(0.0)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].time, 0.5);
        // (b - a) = (2, 0), motion (0, 2): cross product 4 > 0
        assert_eq!(c[0].direction, CrossingDirection::Forward);
        let back = traj(1.0, &[(0, [0.0, 1.0]), (1, [0.0, -1.0])]);
        assert_eq!(detect_crossings(&back, &line(0.0)).unwrap()[0].direction, CrossingDirection::Backward);
    }

    #[test]
    fn no_intersection() {
        let t = traj(1.0, &[(0, [0.0, -1.0]), (1, [5.0, -1.0]), (2, [5.0, -3.0])]);
        assert!(detect_crossings(&t, &line(0.0)).unwrap().is_empty());
        // crosses the infinite line but outside the segment
        let wide = traj(1.0, &[(0, [3.0, -1.0]), (1, [3.0, 1.0])]);
        assert!(detect_crossings(&wide, &line(0.0)).unwrap().is_empty());
    }

    #[test]
    fn sample_on_the_line_counts_once() {
        let t = traj(1.0, &[(0, [0.0, -1.0]), (1, [0.0, 0.0]), (2, [0.0, 1.0])]);
        let c = detect_crossings(&t, &line(0.0)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].time, 1.0);
    }

    #[test]
    fn debounce_keeps_first_per_window() {
        // 100 fps, alternating sides every sample for 3 s
        let pts: Vec<(u64, [f64; 2])> = (0..300)
            .map(|f| (f, [0.0, if f % 2 == 0 { -0.5 } else { 0.5 }]))
            .collect();
        let t = traj(100.0, &pts);
        let c = detect_crossings(&t, &line(1.0)).unwrap();
        let times: Vec<f64> = c.iter().map(|c| c.time).collect();
        assert_eq!(times.len(), 3);
        assert_eq!(times[0], 0.005);
        for w in times.windows(2) {
            // accepted at the first crossing at least 1 s after the previous one
            assert!(w[1] - w[0] >= 1.0 && w[1] - w[0] < 1.0 + 0.01 + 1e-9);
        }
        assert_eq!(detect_crossings(&t, &line(0.0)).unwrap().len(), 299);
    }

    #[test]
    fn needs_two_samples() {
        let t = traj(1.0, &[(0, [0.0, 0.0])]);
        assert_eq!(detect_crossings(&t, &line(0.0)), Err(MetricsError::TooFewSamples(1)));
    }

    fn crossing(time: f64, direction: CrossingDirection) -> Crossing {
        Crossing {
            time,
            direction,
            sample_index: 0,
        }
    }

    #[test]
    fn completion_examples() {
        let fwd = CrossingDirection::Forward;
        let c = completion_time(&[crossing(30.0 / 30.0, fwd), crossing(1071.0 / 30.0, fwd)], 1);
        assert!((c.completion_seconds.unwrap() - 34.7).abs() < 1e-9);
        assert!(c.events.is_empty());

        let none = completion_time(&[], 1);
        assert_eq!(none.completion_seconds, None);
        assert_eq!(none.events.len(), 1);
        assert_eq!(none.events[0].kind, FailureKind::DidNotFinish);

        let three = [crossing(1.0, fwd), crossing(4.0, fwd), crossing(9.0, fwd)];
        assert_eq!(completion_time(&three, 2).completion_seconds, Some(8.0));
        assert_eq!(completion_time(&three, 3).completion_seconds, None);
    }

    #[test]
    fn completion_ignores_opposite_direction() {
        let (f, b) = (CrossingDirection::Forward, CrossingDirection::Backward);
        let c = completion_time(&[crossing(1.0, f), crossing(2.0, b), crossing(5.0, f)], 1);
        assert_eq!(c.completion_seconds, Some(4.0));
        let dnf = completion_time(&[crossing(1.0, f), crossing(2.0, b)], 1);
        assert_eq!(dnf.completion_seconds, None);
    }

    #[test]
    fn degenerate_line_rejected() {
        let p = Point2::twin(1.0, 1.0).unwrap();
        assert!(StartLine::new(p, p, 0.0).is_err());
        assert!(StartLine::new(p, Point2::camera(0.0, 0.0).unwrap(), 0.0).is_err());
    }
}
