use serde::{Deserialize, Serialize};

use super::{
    completion_time, detect_crossings, off_track_events, path_distance, similarity_score, FailureEvent,
    MetricsError, PathDistanceResult, SimilarityConfig, StartLine,
};
use crate::detection::Trajectory;
use crate::geometry::Point2;
use crate::track::ReferencePath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConfig {
    pub similarity: SimilarityConfig,
    pub start_line: StartLine,
    pub required_laps: usize,
    pub corridor_px: f64,
    pub min_offtrack_s: f64,
    /// Also score against the reversed reference and keep the better result.
    pub direction_auto: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceDirection {
    AsTraced,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkScore {
    pub similarity_percent: f64,
    pub distance: PathDistanceResult,
    pub completion_seconds: Option<f64>,
    pub failure_events: Vec<FailureEvent>,
    pub reference_direction: ReferenceDirection,
    pub crossings: usize,
    pub scored_samples: usize,
    pub reference_samples: usize,
}

fn nearest_vertex(p: [f64; 2], vertices: &[Point2]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, v) in vertices.iter().enumerate() {
        let d = (v.x() - p[0]).hypot(v.y() - p[1]);
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}

/// Walks a closed reference from the vertex nearest `first` through `laps`
/// full loops and on to the vertex nearest `last`. With `laps > 0` the final
/// leg may also step back by up to half a loop, which covers a window that
/// ends just short of the starting vertex.
fn unroll(reference: &ReferencePath, first: [f64; 2], last: [f64; 2], laps: usize) -> Vec<Point2> {
    let v = reference.points();
    let m = v.len() as i64;
    let s = nearest_vertex(first, v) as i64;
    let e = nearest_vertex(last, v) as i64;
    let mut offset = (e - s).rem_euclid(m);
    if laps > 0 && 2 * offset > m {
        offset -= m;
    }
    let total = laps as i64 * m + offset;
    let step = total.signum();
    (0..=total.abs())
        .map(|k| v[(s + step * k).rem_euclid(m) as usize])
        .collect()
}

/// Scores a twin-frame trajectory: similarity, lap completion and failure
/// events.
///
/// For a closed reference with a completed run, only the samples bracketing
/// the timed laps are compared, against the reference unrolled over the same
/// number of laps. Otherwise the whole trajectory is compared.
pub fn score_trajectory(
    t: &Trajectory,
    reference: &ReferencePath,
    config: &ScoringConfig,
) -> Result<BenchmarkScore, MetricsError> {
    let crossings = detect_crossings(t, &config.start_line)?;
    let completion = completion_time(&crossings, config.required_laps);
    let mut events = off_track_events(t, reference, config.corridor_px, config.min_offtrack_s)?;
    events.extend(completion.events.iter().cloned());
    events.sort_by(|a, b| a.time.total_cmp(&b.time));

    let samples = t.samples();
    let window = match (completion.first, completion.last) {
        (Some(first), Some(last)) if reference.closed() => &samples[first.sample_index..=last.sample_index + 1],
        _ => samples,
    };
    let driven: Vec<Point2> = window.iter().map(|s| s.point).collect();
    let laps = if completion.completion_seconds.is_some() {
        config.required_laps
    } else {
        0
    };

    let mut candidates = vec![(ReferenceDirection::AsTraced, reference.clone())];
    if config.direction_auto {
        candidates.push((ReferenceDirection::Reversed, reference.reversed()));
    }
    let mut best: Option<(f64, PathDistanceResult, ReferenceDirection, usize)> = None;
    for (direction, path) in candidates {
        let target = if path.closed() {
            let (first, last) = (driven[0].xy(), driven[driven.len() - 1].xy());
            unroll(&path, first, last, laps)
        } else {
            path.points().to_vec()
        };
        let d = path_distance(&driven, &target, &config.similarity)?;
        let s = similarity_score(&d, &config.similarity);
        let better = match &best {
            None => true,
            Some((bs, bd, _, _)) => s > *bs || (s == *bs && d.distance < bd.distance),
        };
        if better {
            best = Some((s, d, direction, target.len()));
        }
    }
    let (similarity_percent, distance, reference_direction, reference_samples) = best.expect("one candidate");
    Ok(BenchmarkScore {
        similarity_percent,
        distance,
        completion_seconds: completion.completion_seconds,
        failure_events: events,
        reference_direction,
        crossings: crossings.len(),
        scored_samples: driven.len(),
        reference_samples,
    })
}
