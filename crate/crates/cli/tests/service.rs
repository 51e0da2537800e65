use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use trackbench_cli::service::{router, ServiceState, SharedState};
use trackbench_core::geometry::{keypoint_error_curve, reprojection_diagnostics};
use trackbench_core::harness::{simulate_trial, SimScenario};
use trackbench_core::{estimate_homography, KeypointSet, TrackImage};

struct Fixture {
    _dir: tempfile::TempDir,
    camera: PathBuf,
    twin: PathBuf,
    keypoints: KeypointSet,
    state: SharedState,
}

fn fixture(noise: f64) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let trial = simulate_trial(&SimScenario::oval(5.0, 20.0, noise, 11)).unwrap();
    let camera = dir.path().join("frame.png");
    let twin = dir.path().join("track.png");
    let size = trial.keypoints.image_size_camera();
    TrackImage::new(size.width, size.height, vec![90; (size.width * size.height) as usize], 128)
        .unwrap()
        .save_png(&camera)
        .unwrap();
    trial.track_image.save_png(&twin).unwrap();
    Fixture {
        _dir: dir,
        camera,
        twin,
        keypoints: trial.keypoints,
        state: ServiceState::new(),
    }
}

async fn call(state: &SharedState, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn call_json(state: &SharedState, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = call(state, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn start(f: &Fixture) -> Value {
    let (status, body) = call_json(
        &f.state,
        "POST",
        "/session",
        Some(json!({ "camera_path": f.camera, "twin_path": f.twin })),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    body
}

async fn add_pair(f: &Fixture, i: usize) -> (StatusCode, Value) {
    let p = &f.keypoints.pairs()[i];
    call_json(
        &f.state,
        "POST",
        "/keypoints",
        Some(json!({ "camera": p.camera.xy(), "twin": p.twin.xy(), "label": p.label })),
    )
    .await
}

#[tokio::test]
async fn session_lifecycle() {
    let f = fixture(0.0);
    let (status, body) = call_json(&f.state, "GET", "/session", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"], "no_session");

    let first = start(&f).await;
    assert_eq!(first["status"], "pending");
    assert_eq!(first["image_size_camera"], json!([1920, 1080]));
    add_pair(&f, 0).await;
    let second = start(&f).await;
    assert_ne!(first["session_id"], second["session_id"]);
    assert_eq!(second["count"], 0);

    let (status, body) = call_json(
        &f.state,
        "POST",
        "/session",
        Some(json!({ "camera_path": f.camera, "twin_path": "/nonexistent/twin.png" })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "file_not_found");
}

#[tokio::test]
async fn images_are_png() {
    let f = fixture(0.0);
    assert_eq!(call(&f.state, "GET", "/image/twin", None).await.0, StatusCode::NOT_FOUND);
    start(&f).await;
    for uri in ["/image/camera", "/image/twin"] {
        let (status, bytes) = call(&f.state, "GET", uri, None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
    }
    let (_, twin) = call(&f.state, "GET", "/image/twin", None).await;
    let copy = f.camera.parent().unwrap().join("served.png");
    std::fs::write(&copy, twin).unwrap();
    let decoded = TrackImage::load(&copy, 128).unwrap();
    assert_eq!((decoded.width(), decoded.height()), (500, 350));
}

#[tokio::test]
async fn adding_pairs_reports_diagnostics() {
    let f = fixture(0.0);
    start(&f).await;
    for i in 0..3 {
        let (status, body) = add_pair(&f, i).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body, json!({ "status": "pending", "count": i + 1 }));
    }
    let (status, _) = call_json(&f.state, "GET", "/diagnostics", None).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (_, body) = add_pair(&f, 3).await;
    assert_eq!(body["status"], "ready");
    assert!(body["diagnostics"]["average_error"].as_f64().unwrap() < 1e-6);
    assert!(body.get("leave_one_out").is_none());
    let (_, body) = add_pair(&f, 4).await;
    assert!(body["leave_one_out"]["average_error"].as_f64().unwrap() < 1e-6);

    let (status, body) = call_json(&f.state, "GET", "/diagnostics", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["count"], 5);

    let (status, body) =
        call_json(&f.state, "POST", "/keypoints", Some(json!({ "camera": [-5.0, 10.0], "twin": [10.0, 10.0] }))).await;
    assert_eq!((status, body["error"].as_str()), (StatusCode::BAD_REQUEST, Some("out_of_bounds")));
    let dup = f.keypoints.pairs()[0].camera.xy();
    let (status, body) =
        call_json(&f.state, "POST", "/keypoints", Some(json!({ "camera": dup, "twin": [10.0, 10.0] }))).await;
    assert_eq!((status, body["error"].as_str()), (StatusCode::BAD_REQUEST, Some("duplicate_camera_point")));
    let (status, _) = call_json(&f.state, "POST", "/keypoints", Some(json!({ "camera": [1.0] }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn removing_pairs() {
    let f = fixture(0.0);
    start(&f).await;
    for i in 0..5 {
        add_pair(&f, i).await;
    }
    let (status, body) = call_json(&f.state, "DELETE", "/keypoints/99", None).await;
    assert_eq!((status, body["error"].as_str()), (StatusCode::NOT_FOUND, Some("index_out_of_range")));
    let (_, body) = call_json(&f.state, "DELETE", "/keypoints/4", None).await;
    assert_eq!((body["status"].as_str(), body["count"].as_u64()), (Some("ready"), Some(4)));
    let (_, body) = call_json(&f.state, "DELETE", "/keypoints/0", None).await;
    assert_eq!(body, json!({ "status": "pending", "count": 3 }));
}

#[tokio::test]
async fn error_curve_matches_library() {
    let f = fixture(2.0);
    start(&f).await;
    for i in 0..f.keypoints.len() {
        add_pair(&f, i).await;
    }
    let (status, body) = call_json(&f.state, "GET", "/error-curve", None).await;
    assert_eq!(status, StatusCode::OK);
    let expected = keypoint_error_curve(&f.keypoints, 4).unwrap();
    assert_eq!(body["points"], serde_json::to_value(&expected).unwrap());
}

#[tokio::test]
async fn export_round_trip() {
    let f = fixture(1.0);
    start(&f).await;
    add_pair(&f, 0).await;
    add_pair(&f, 1).await;
    let out = f.camera.parent().unwrap().join("picked.json");
    let (status, body) = call_json(&f.state, "POST", "/export", Some(json!({ "path": out }))).await;
    assert_eq!((status, body["error"].as_str()), (StatusCode::CONFLICT, Some("too_few_points")));
    assert!(!out.exists());

    for i in 2..6 {
        add_pair(&f, i).await;
    }
    let (status, _) = call_json(&f.state, "POST", "/export", Some(json!({ "path": out }))).await;
    assert_eq!(status, StatusCode::OK);
    let exported = KeypointSet::load(&out).unwrap();
    assert_eq!(exported, f.keypoints.prefix(6));

    let (_, reported) = call_json(&f.state, "GET", "/diagnostics", None).await;
    let h = estimate_homography(&exported).unwrap();
    let d = reprojection_diagnostics(&h, &exported).unwrap();
    assert_eq!(reported["diagnostics"], serde_json::to_value(&d).unwrap());
    assert_eq!(reported["homography"], serde_json::to_value(&h).unwrap());
}

#[tokio::test]
async fn edits_replay_to_the_same_state() {
    let f = fixture(0.0);
    start(&f).await;
    // add all, drop a few, re-add one
    for i in 0..f.keypoints.len() {
        add_pair(&f, i).await;
    }
    for index in [6, 0, 2] {
        call_json(&f.state, "DELETE", &format!("/keypoints/{index}"), None).await;
    }
    add_pair(&f, 0).await;
    let (_, live) = call_json(&f.state, "GET", "/session", None).await;

    let mut replay = KeypointSet::empty(f.keypoints.image_size_camera(), f.keypoints.image_size_twin()).unwrap();
    for i in 0..f.keypoints.len() {
        replay.push(f.keypoints.pairs()[i].clone()).unwrap();
    }
    for index in [6, 0, 2] {
        replay.remove(index).unwrap();
    }
    replay.push(f.keypoints.pairs()[0].clone()).unwrap();
    assert_eq!(KeypointSet::from_json_str(&live["keypoints"].to_string()).unwrap(), replay);
}

