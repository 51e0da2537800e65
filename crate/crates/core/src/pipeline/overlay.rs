use std::fmt::Write;

use base64::Engine;

use crate::detection::Trajectory;
use crate::geometry::KeypointSet;
use crate::metrics::{FailureEvent, FailureKind, StartLine};
use crate::track::{ReferencePath, TrackImage};

/// Inputs for the diagnostic overlay, all in twin pixels.
pub struct OverlayInputs<'a> {
    pub track: &'a TrackImage,
    pub reference: &'a ReferencePath,
    pub trajectory: &'a Trajectory,
    pub start_line: &'a StartLine,
    pub keypoints: &'a KeypointSet,
    pub failure_events: &'a [FailureEvent],
}

fn points_attr(points: impl Iterator<Item = [f64; 2]>) -> String {
    let mut s = String::new();
    for (i, [x, y]) in points.enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.3},{y:.3}");
    }
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Layered SVG: track image, reference, driven trajectory (one polyline per
/// gap-free run), start line, keypoints and one marker per failure event.
pub fn render_overlay(inputs: &OverlayInputs<'_>) -> String {
    let (w, h) = (inputs.track.width(), inputs.track.height());
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );

    let png = base64::engine::general_purpose::STANDARD.encode(inputs.track.encode_png());
    let _ = writeln!(
        svg,
        r#"<g id="track" data-layer="track"><image width="{w}" height="{h}" href="data:image/png;base64,{png}"/></g>"#
    );

    let tag = if inputs.reference.closed() { "polygon" } else { "polyline" };
    let _ = writeln!(
        svg,
        r##"<g id="reference" data-layer="reference"><{tag} points="{}" fill="none" stroke="#2b8cbe" stroke-width="1.5"/></g>"##,
        points_attr(inputs.reference.coords().into_iter())
    );

    let _ = write!(svg, r#"<g id="trajectory" data-layer="trajectory">"#);
    let samples = inputs.trajectory.samples();
    let mut start = 0;
    for i in 0..samples.len() {
        let run_ends = i + 1 == samples.len() || samples[i + 1].frame_index != samples[i].frame_index + 1;
        if run_ends {
            let _ = write!(
                svg,
                r##"<polyline points="{}" fill="none" stroke="#e34a33" stroke-width="1"/>"##,
                points_attr(samples[start..=i].iter().map(|s| s.point.xy()))
            );
            start = i + 1;
        }
    }
    let _ = writeln!(svg, "</g>");

    let (a, b) = (inputs.start_line.a.xy(), inputs.start_line.b.xy());
    let _ = writeln!(
        svg,
        r##"<g id="start-line" data-layer="start-line"><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#31a354" stroke-width="2"/></g>"##,
        a[0], a[1], b[0], b[1]
    );

    let _ = write!(svg, r#"<g id="keypoints" data-layer="keypoints">"#);
    for (i, pair) in inputs.keypoints.pairs().iter().enumerate() {
        let label = pair.label.clone().unwrap_or_else(|| i.to_string());
        let _ = write!(
            svg,
            r##"<circle class="keypoint" data-label="{}" cx="{:.3}" cy="{:.3}" r="4" fill="#756bb1"/>"##,
            escape(&label),
            pair.twin.x(),
            pair.twin.y()
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = write!(svg, r#"<g id="failure-events" data-layer="failure-events">"#);
    for event in inputs.failure_events {
        if let Some(s) = samples.iter().min_by(|p, q| (p.time - event.time).abs().total_cmp(&(q.time - event.time).abs())) {
            let kind = match event.kind {
                FailureKind::OffTrack => "off_track",
                FailureKind::DidNotFinish => "did_not_finish",
            };
            let _ = write!(
                svg,
                r##"<circle class="event-marker" data-kind="{kind}" data-time="{:.3}" data-detail="{}" cx="{:.3}" cy="{:.3}" r="6" fill="none" stroke="#fd8d3c" stroke-width="2"/>"##,
                event.time,
                escape(&event.detail),
                s.point.x(),
                s.point.y()
            );
        }
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
