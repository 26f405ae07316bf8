//! JSON run configuration. A config file is a flat object whose keys mirror
//! the CLI flag names (kebab-case, no leading dashes); values supply
//! defaults for any flag not given on the command line, and flags always
//! win. Unknown keys are rejected so typos fail loudly.

use crate::HarnessError;
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

/// Every flag name a config file may set. `config` itself is excluded: a
/// config file cannot chain-load another one.
const KNOWN_KEYS: &[&str] = &[
    // globals
    "seed",
    "replicates",
    "out",
    "workers",
    // curves
    "r-min",
    "r-max",
    "points",
    "marginals-out",
    // landscape
    "intensity",
    "domain",
    "tasks",
    "anchors-out",
    // scaling
    "scaled-intensity",
    "probes",
    "stakes",
    "wedge-out",
    "wedge-points",
    "split-out",
    "split-domain",
    "split-gaps",
    "split-alphas",
    // reasoning
    "q",
    "kappa",
    "xi",
    "option-out",
    "option-q",
    "option-kappa",
    "option-xi",
    "samples",
    "amplification-out",
    "amp-xi",
    // mastery
    "span",
    "grid-points",
    "length-scale",
    "noise",
    "beta",
    "horizon",
    "map-out",
    "fringe-out",
    "fringe-stakes",
    "fringe-gaps",
    "trap-out",
    "trap-horizon",
    "trap-forced-step",
    "trap-forced-index",
    // apps
    "high-intensity",
    "high-cv",
    "low-intensity",
    "low-cv",
    "convexity",
    "q-min",
    "q-max",
    "q-points",
    "adoption-out",
    "cv",
    "r-points",
    "delegation-out",
    "effort-cost",
    "verify-out",
    "verify-cost",
    "verify-stakes",
    // adjust
    "scores",
    "format",
    "tail-scores",
    "tail-share",
    "worst-k",
    // voronoi
    "box-side",
];

fn bad(key: &str, wanted: &str) -> HarnessError {
    HarnessError::Validation(format!("config key \"{key}\" must be {wanted}"))
}

/// Parsed config file, or the empty config when none was given.
#[derive(Debug, Default)]
pub struct Config {
    values: Map<String, Value>,
}

impl Config {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| HarnessError::Validation(format!("config is not valid JSON: {e}")))?;
        let Value::Object(values) = value else {
            return Err(HarnessError::Validation(
                "config must be a JSON object mapping flag names to values".into(),
            ));
        };
        for key in values.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(HarnessError::Validation(format!(
                    "unknown config key \"{key}\"; keys mirror the CLI flag names"
                )));
            }
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        match self.values.get(key) {
            Some(Value::Null) | None => None,
            Some(v) => Some(v),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, HarnessError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => {
                n.as_f64().map(Some).ok_or_else(|| bad(key, "a finite number"))
            }
            Some(_) => Err(bad(key, "a number")),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, HarnessError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => {
                n.as_u64().map(Some).ok_or_else(|| bad(key, "a non-negative integer"))
            }
            Some(_) => Err(bad(key, "a non-negative integer")),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, HarnessError> {
        match self.u64(key)? {
            None => Ok(None),
            Some(n) => usize::try_from(n)
                .map(Some)
                .map_err(|_| bad(key, "an integer that fits the platform")),
        }
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, HarnessError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(bad(key, "a string")),
        }
    }

    pub fn path(&self, key: &str) -> Result<Option<PathBuf>, HarnessError> {
        Ok(self.string(key)?.map(PathBuf::from))
    }

    /// Accepts either a JSON array of numbers or a comma-separated string,
    /// matching what the equivalent flag takes.
    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, HarnessError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => parse_f64_list(s).map(Some),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    let Value::Number(n) = item else {
                        return Err(bad(key, "an array of numbers"));
                    };
                    out.push(n.as_f64().ok_or_else(|| bad(key, "an array of finite numbers"))?);
                }
                Ok(Some(out))
            }
            Some(_) => Err(bad(key, "an array of numbers or a comma-separated string")),
        }
    }
}

/// Parse a comma-separated list of numbers, as used by the list-valued
/// flags ("2,8" or "0.1, 0.375, 1").
pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, HarnessError> {
    let mut out = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(HarnessError::Validation(format!(
                "empty entry in number list \"{text}\""
            )));
        }
        out.push(piece.parse::<f64>().map_err(|_| {
            HarnessError::Validation(format!("\"{piece}\" in \"{text}\" is not a number"))
        })?);
    }
    if out.is_empty() {
        return Err(HarnessError::Validation("number list is empty".into()));
    }
    Ok(out)
}
