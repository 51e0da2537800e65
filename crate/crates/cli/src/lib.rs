//! Command implementations behind the `trackbench` binary and the
//! calibration HTTP service.

pub mod service;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use trackbench_core::harness::{simulate_trial, write_fixture, SimScenario};
use trackbench_core::pipeline::{
    process_track, run_benchmark_file, suggest_baseline_for, PipelineError, OVERLAY_FILE, REPORT_FILE,
};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GATE: i32 = 3;
pub const EXIT_DATA: i32 = 4;

/// A failed command: message for stderr plus the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        Self {
            code: e.exit_code(),
            message: format!("{} stage: {e}", e.stage()),
        }
    }
}

/// Extracts the reference path and writes it to `output` or returns it.
pub fn cmd_process_track(
    image: &Path,
    output: Option<&Path>,
    threshold: u8,
    track_is_bright: bool,
    resample_count: usize,
) -> Result<String, CliError> {
    let path = process_track(image, threshold, track_is_bright, resample_count).map_err(|e| CliError::data(e.to_string()))?;
    match output {
        Some(out) => {
            path.save(out).map_err(|e| CliError::data(e.to_string()))?;
            Ok(format!(
                "wrote {} points ({}, arc length {:.3} px) to {}",
                path.len(),
                if path.closed() { "closed" } else { "open" },
                path.arc_length(),
                out.display()
            ))
        }
        None => Ok(path.to_json_string()),
    }
}

pub fn cmd_benchmark(config: &Path) -> Result<String, CliError> {
    let run = run_benchmark_file(config)?;
    let s = &run.report.score;
    let completion = s
        .completion_seconds
        .map_or_else(|| "did not finish".to_string(), |c| format!("{c:.3} s"));
    Ok(format!(
        "similarity {:.2} % ({} distance {:.3} px), completion {completion}, {} failure event(s)\nwrote {} and {}",
        s.path_similarity_percent,
        s.metric,
        s.distance_px,
        s.failure_events.len(),
        run.output_dir.join(REPORT_FILE).display(),
        run.output_dir.join(OVERLAY_FILE).display(),
    ))
}

/// Reads a scenario file. An optional top-level `output_dir` names the
/// fixture directory, relative to the scenario file.
pub fn load_scenario(path: &Path) -> Result<(SimScenario, Option<PathBuf>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let output_dir = match value.as_object_mut().and_then(|o| o.remove("output_dir")) {
        None => None,
        Some(Value::String(s)) => Some(base.join(s)),
        Some(other) => return Err(CliError::config(format!("output_dir must be a string, got {other}"))),
    };
    let scenario =
        SimScenario::from_json_str(&value.to_string()).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Ok((scenario, output_dir))
}

pub fn cmd_simulate(config: &Path, output: Option<&Path>) -> Result<String, CliError> {
    let (scenario, from_file) = load_scenario(config)?;
    let dir = output
        .map(Path::to_path_buf)
        .or(from_file)
        .unwrap_or_else(|| config.parent().unwrap_or(Path::new(".")).join("fixture"));
    let trial = simulate_trial(&scenario).map_err(|e| CliError::data(e.to_string()))?;
    write_fixture(&trial, &dir).map_err(|e| CliError::data(e.to_string()))?;
    Ok(format!(
        "wrote fixture to {} ({} frames, lap {:.3} s); run `trackbench benchmark -c {}`",
        dir.display(),
        trial.detections.len(),
        trial.effective_lap_time_s,
        dir.join("benchmark.json").display()
    ))
}

/// Suggested `metric.baseline_px` for a reference path file.
pub fn cmd_suggest_baseline(path: &Path) -> Result<f64, CliError> {
    suggest_baseline_for(path)
        .map(|(_, b)| b)
        .map_err(|e| CliError::data(e.to_string()))
}
