//! Run configuration: a flat JSON object naming one experiment.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use epitaxy_core::experiments::Experiment;
use epitaxy_core::Error;
use serde_json::{Map, Value};

use crate::schema::{self, Kind};

/// Keys handled by the front end rather than by a driver.
const FRONT_END_KEYS: [&str; 4] = ["out_dir", "workers", "timing", "cadence"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Record wall-clock time in the verdict. Off by default so that
    /// repeated runs produce identical files.
    pub timing: bool,
}

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    Json(String),
    Schema(schema::Violation),
    /// Well-formed but rejected by the driver's parameter checks.
    Invalid { field: String, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            ConfigError::Json(m) => write!(f, "not valid JSON: {m}"),
            ConfigError::Schema(v) => write!(f, "schema violation at {v}"),
            ConfigError::Invalid { field, reason } => write!(f, "field /{field}: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => ConfigError::Invalid {
                field: name.to_string(),
                reason,
            },
            other => ConfigError::Invalid {
                field: String::new(),
                reason: other.to_string(),
            },
        }
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

/// Parses, checks against the config schema, applies defaults and runs the
/// driver's cheap parameter checks.
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
    schema::check(Kind::Config, &value).map_err(ConfigError::Schema)?;
    let Value::Object(mut map) = value else {
        unreachable!("schema requires an object");
    };
    let mut front = Map::new();
    for key in FRONT_END_KEYS {
        if let Some(v) = map.remove(key) {
            front.insert(key.to_string(), v);
        }
    }
    if let Some(cadence) = front.get("cadence") {
        let controls = map
            .entry("controls")
            .or_insert_with(|| Value::Object(Map::new()));
        let Value::Object(c) = controls else {
            unreachable!("schema requires an object");
        };
        if c.contains_key("record_every") {
            return Err(ConfigError::Invalid {
                field: "cadence".into(),
                reason: "conflicts with controls.record_every".into(),
            });
        }
        c.insert("record_every".into(), cadence.clone());
    }
    let experiment: Experiment =
        serde_json::from_value(Value::Object(map)).map_err(|e| ConfigError::Invalid {
            field: String::new(),
            reason: e.to_string(),
        })?;
    experiment.validate()?;
    Ok(RunConfig {
        experiment,
        out_dir: front.get("out_dir").and_then(Value::as_str).map(PathBuf::from),
        workers: front.get("workers").and_then(Value::as_u64).map(|w| w as usize),
        timing: front.get("timing").and_then(Value::as_bool).unwrap_or(false),
    })
}
