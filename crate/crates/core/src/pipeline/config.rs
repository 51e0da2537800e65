use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::detection::DEFAULT_MIN_CONFIDENCE;
use crate::metrics::MetricKind;
use crate::track::{DEFAULT_RESAMPLE_COUNT, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Read { path: String, reason: String },
    #[error("config is not valid JSON: {0}")]
    Parse(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("`{key}`: file not found: {path}")]
    FileNotFound { key: String, path: String },
    #[error("{0}")]
    Conflict(String),
}

/// A path as written in the config plus its resolved location.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigPath {
    #[serde(rename = "path")]
    pub raw: String,
    #[serde(skip)]
    pub resolved: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackSection {
    pub image: ConfigPath,
    pub threshold: u8,
    pub is_bright: bool,
    pub resample_count: usize,
    pub reference_path: Option<ConfigPath>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSection {
    pub keypoints: ConfigPath,
    pub max_average_error_px: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionSource {
    File(ConfigPath),
    Detector { command: String, frames_dir: ConfigPath },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionsSection {
    pub source: DetectionSource,
    pub fps: f64,
    pub min_confidence: f64,
    pub smoothing_window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSection {
    pub kind: MetricKind,
    pub clamp_delta_px: Option<f64>,
    pub baseline_px: f64,
    pub required_laps: usize,
    pub corridor_px: f64,
    pub min_offtrack_s: f64,
    pub direction_auto: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartLineSection {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub min_crossing_interval_s: f64,
}

/// Parsed benchmark configuration with defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkConfig {
    pub track: TrackSection,
    pub calibration: CalibrationSection,
    pub detections: DetectionsSection,
    pub metric: MetricSection,
    pub start_line: StartLineSection,
    pub output_dir: ConfigPath,
    #[serde(skip)]
    pub source: Option<PathBuf>,
}

const COMMENT: &str = "_comment";

struct Section<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Section<'a> {
    fn new(path: &str, value: &'a Value, allowed: &[&str]) -> Result<Self, ConfigError> {
        let map = value.as_object().ok_or_else(|| ConfigError::InvalidValue {
            key: if path.is_empty() { "<root>".into() } else { path.into() },
            reason: "expected an object".into(),
        })?;
        let section = Self { path: path.into(), map };
        if let Some(k) = map.keys().find(|k| k.as_str() != COMMENT && !allowed.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey(section.key(k)));
        }
        Ok(section)
    }

    fn key(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn opt<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| ConfigError::InvalidValue {
                    key: self.key(key),
                    reason: e.to_string(),
                }),
        }
    }

    fn req<T: DeserializeOwned>(&self, key: &str) -> Result<T, ConfigError> {
        self.opt(key)?.ok_or_else(|| ConfigError::MissingKey(self.key(key)))
    }

    fn or<T: DeserializeOwned>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    fn sub(&self, key: &str, allowed: &[&str]) -> Result<Option<Section<'a>>, ConfigError> {
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => Section::new(&self.key(key), v, allowed).map(Some),
        }
    }

    fn req_sub(&self, key: &str, allowed: &[&str]) -> Result<Section<'a>, ConfigError> {
        self.sub(key, allowed)?.ok_or_else(|| ConfigError::MissingKey(self.key(key)))
    }

    fn invalid(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::InvalidValue {
            key: self.key(key),
            reason: reason.into(),
        }
    }

    fn positive(&self, key: &str, v: f64) -> Result<f64, ConfigError> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(self.invalid(key, format!("must be positive, got {v}")))
        }
    }

    fn non_negative(&self, key: &str, v: f64) -> Result<f64, ConfigError> {
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(self.invalid(key, format!("must be >= 0, got {v}")))
        }
    }

    fn file(&self, key: &str, base: &Path, raw: String) -> Result<ConfigPath, ConfigError> {
        let resolved = base.join(&raw);
        if !resolved.is_file() {
            return Err(ConfigError::FileNotFound {
                key: self.key(key),
                path: resolved.display().to_string(),
            });
        }
        Ok(ConfigPath { raw, resolved })
    }

    fn req_file(&self, key: &str, base: &Path) -> Result<ConfigPath, ConfigError> {
        let raw: String = self.req(key)?;
        self.file(key, base, raw)
    }

    fn opt_file(&self, key: &str, base: &Path) -> Result<Option<ConfigPath>, ConfigError> {
        self.opt::<String>(key)?.map(|raw| self.file(key, base, raw)).transpose()
    }
}

impl BenchmarkConfig {
    /// Reads and validates a config file. Relative paths resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut config = Self::from_json_str(&text, base)?;
        config.source = Some(path.to_path_buf());
        Ok(config)
    }

    pub fn from_json_str(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::from_value(&value, base)
    }

    pub fn from_value(value: &Value, base: &Path) -> Result<Self, ConfigError> {
        let root = Section::new(
            "",
            value,
            &["track", "calibration", "detections", "detector", "metric", "start_line", "output"],
        )?;

        let t = root.req_sub("track", &["image", "threshold", "is_bright", "resample_count", "reference_path"])?;
        let resample_count = t.or("resample_count", DEFAULT_RESAMPLE_COUNT)?;
        if resample_count < 2 {
            return Err(t.invalid("resample_count", "must be at least 2"));
        }
        let track = TrackSection {
            image: t.req_file("image", base)?,
            threshold: t.or("threshold", DEFAULT_THRESHOLD)?,
            is_bright: t.or("is_bright", true)?,
            resample_count,
            reference_path: t.opt_file("reference_path", base)?,
        };

        let c = root.req_sub("calibration", &["keypoints", "max_average_error_px"])?;
        let calibration = CalibrationSection {
            keypoints: c.req_file("keypoints", base)?,
            max_average_error_px: c
                .opt::<f64>("max_average_error_px")?
                .map(|v| c.non_negative("max_average_error_px", v))
                .transpose()?,
        };

        let d = root.req_sub("detections", &["path", "fps", "min_confidence", "smoothing_window"])?;
        let detector = root.sub("detector", &["command", "frames_dir"])?;
        let source = match (d.opt::<String>("path")?, detector) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Conflict(
                    "set either `detections.path` or the `detector` section, not both".into(),
                ))
            }
            (None, None) => {
                return Err(ConfigError::MissingKey("detections.path".into()));
            }
            (Some(raw), None) => DetectionSource::File(d.file("path", base, raw)?),
            (None, Some(det)) => {
                let command: String = det.req("command")?;
                if command.trim().is_empty() {
                    return Err(det.invalid("command", "must not be empty"));
                }
                let raw: String = det.req("frames_dir")?;
                let resolved = base.join(&raw);
                if !resolved.is_dir() {
                    return Err(ConfigError::FileNotFound {
                        key: det.key("frames_dir"),
                        path: resolved.display().to_string(),
                    });
                }
                DetectionSource::Detector {
                    command,
                    frames_dir: ConfigPath { raw, resolved },
                }
            }
        };
        let min_confidence: f64 = d.or("min_confidence", DEFAULT_MIN_CONFIDENCE)?;
        if !(0.0..=1.0).contains(&min_confidence) {
            return Err(d.invalid("min_confidence", "must lie in [0, 1]"));
        }
        let smoothing_window: usize = d.or("smoothing_window", 1)?;
        if smoothing_window % 2 == 0 {
            return Err(d.invalid("smoothing_window", "must be odd and positive"));
        }
        let detections = DetectionsSection {
            source,
            fps: d.positive("fps", d.req("fps")?)?,
            min_confidence,
            smoothing_window,
        };

        let m = root.req_sub(
            "metric",
            &[
                "kind",
                "clamp_delta_px",
                "baseline_px",
                "required_laps",
                "corridor_px",
                "min_offtrack_s",
                "direction_auto",
            ],
        )?;
        let required_laps: usize = m.or("required_laps", 1)?;
        if required_laps == 0 {
            return Err(m.invalid("required_laps", "must be at least 1"));
        }
        let metric = MetricSection {
            kind: m.or("kind", MetricKind::Dtw)?,
            clamp_delta_px: m
                .opt::<f64>("clamp_delta_px")?
                .map(|v| m.positive("clamp_delta_px", v))
                .transpose()?,
            baseline_px: m.positive("baseline_px", m.req("baseline_px")?)?,
            required_laps,
            corridor_px: m.positive("corridor_px", m.or("corridor_px", 40.0)?)?,
            min_offtrack_s: m.non_negative("min_offtrack_s", m.or("min_offtrack_s", 0.5)?)?,
            direction_auto: m.or("direction_auto", true)?,
        };

        let s = root.req_sub("start_line", &["a", "b", "min_crossing_interval_s"])?;
        let start_line = StartLineSection {
            a: s.req("a")?,
            b: s.req("b")?,
            min_crossing_interval_s: s.non_negative("min_crossing_interval_s", s.or("min_crossing_interval_s", 0.0)?)?,
        };
        if start_line.a == start_line.b {
            return Err(s.invalid("b", "start line endpoints coincide"));
        }
        if start_line.a.iter().chain(&start_line.b).any(|v| !v.is_finite()) {
            return Err(s.invalid("a", "coordinates must be finite"));
        }

        let output_dir = match root.sub("output", &["dir"])? {
            Some(o) => o.or("dir", "out".to_string())?,
            None => "out".to_string(),
        };
        Ok(Self {
            track,
            calibration,
            detections,
            metric,
            start_line,
            output_dir: ConfigPath {
                resolved: base.join(&output_dir),
                raw: output_dir,
            },
            source: None,
        })
    }
}
