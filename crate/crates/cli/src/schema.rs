//! The published JSON schemas and validation against them.

use std::fmt;
use std::sync::OnceLock;

use jsonschema::Validator;
use serde_json::Value;

pub const CONFIG: &str = include_str!("../schemas/config.schema.json");
pub const VERDICT: &str = include_str!("../schemas/verdict.schema.json");
pub const PLOT: &str = include_str!("../schemas/plot.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Config,
    Verdict,
    Plot,
}

/// First schema violation, located by JSON pointer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "/" } else { &self.path };
        write!(f, "{path}: {}", self.message)
    }
}

fn compiled(kind: Kind) -> &'static Validator {
    static CELLS: [OnceLock<Validator>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let (i, text) = match kind {
        Kind::Config => (0, CONFIG),
        Kind::Verdict => (1, VERDICT),
        Kind::Plot => (2, PLOT),
    };
    CELLS[i].get_or_init(|| {
        let schema: Value = serde_json::from_str(text).expect("bundled schema is JSON");
        jsonschema::validator_for(&schema).expect("bundled schema compiles")
    })
}

/// Checks `instance` against the schema of `kind`.
pub fn check(kind: Kind, instance: &Value) -> Result<(), Violation> {
    match compiled(kind).iter_errors(instance).next() {
        None => Ok(()),
        Some(e) => Err(Violation {
            path: e.instance_path().to_string(),
            message: e.to_string(),
        }),
    }
}
