use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Invalid configuration or flags.
#[derive(Debug)]
pub struct ConfigError(String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> ConfigError {
        ConfigError(msg.into())
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn load(path: &Path) -> Result<toml::Table> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).map_err(|e| ConfigError::new(format!("{}: {e}", path.display())).into())
}

/// Drops unset flags so they do not shadow file values.
fn strip_unset(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .filter(|(_, v)| !matches!(v, Value::Null | Value::Bool(false)))
                .filter(|(_, v)| !matches!(v, Value::Array(a) if a.is_empty()))
                .map(|(k, v)| (k, strip_unset(v)))
                .collect(),
        ),
        other => other,
    }
}

fn overlay(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => overlay(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Combines the `[section]` table of the config file with the parsed flags.
pub fn merge_section<T: Serialize + DeserializeOwned>(
    file: Option<&toml::Table>,
    section: &str,
    flags: T,
) -> Result<T> {
    let Some(table) = file.and_then(|f| f.get(section)) else {
        return Ok(flags);
    };
    let mut base = serde_json::to_value(table)?;
    overlay(&mut base, strip_unset(serde_json::to_value(&flags)?));
    serde_json::from_value(base).map_err(|e| ConfigError::new(format!("[{section}]: {e}")).into())
}
