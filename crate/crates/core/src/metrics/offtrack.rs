use super::{FailureEvent, FailureKind, MetricsError};
use crate::detection::Trajectory;
use crate::geometry::{Frame, GeometryError};
use crate::track::ReferencePath;

/// Euclidean distance from `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (p[0] - (a[0] + t * dx)).hypot(p[1] - (a[1] + t * dy))
}

fn distance_to_path(p: [f64; 2], path: &ReferencePath) -> f64 {
    path.segments()
        .map(|(a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// One event per maximal run of consecutive samples farther than
/// `corridor_px` from the reference, kept when the run lasts at least
/// `min_duration_s` (first to last sample time).
pub fn off_track_events(
    t: &Trajectory,
    reference: &ReferencePath,
    corridor_px: f64,
    min_duration_s: f64,
) -> Result<Vec<FailureEvent>, MetricsError> {
    if !(corridor_px.is_finite() && corridor_px > 0.0) {
        return Err(MetricsError::InvalidConfig(format!(
            "corridor must be positive, got {corridor_px}"
        )));
    }
    if t.frame() != Frame::Twin {
        return Err(GeometryError::FrameMismatch {
            expected: Frame::Twin,
            found: t.frame(),
        }
        .into());
    }
    let samples = t.samples();
    let mut events = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        let d = distance_to_path(samples[i].point.xy(), reference);
        if d <= corridor_px {
            i += 1;
            continue;
        }
        let start = i;
        let mut worst = d;
        i += 1;
        while i < samples.len() {
            let d = distance_to_path(samples[i].point.xy(), reference);
            if d <= corridor_px {
                break;
            }
            worst = worst.max(d);
            i += 1;
        }
        let (first, last) = (&samples[start], &samples[i - 1]);
        let duration = last.time - first.time;
        if duration >= min_duration_s {
            events.push(FailureEvent {
                time: first.time,
                kind: FailureKind::OffTrack,
                detail: format!(
                    "{} samples outside the {corridor_px} px corridor, max deviation {worst:.2} px",
                    i - start
                ),
                duration_seconds: Some(duration),
            });
        }
    }
    Ok(events)
}
