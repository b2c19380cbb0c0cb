use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use mfqec::statevec::DEFAULT_BRANCH_THRESHOLD;
use mfqec::steane::CLASSIFY_THRESHOLD;

/// Run metadata written at the top of every output file.
pub struct Provenance {
    command: String,
    config: Value,
    seed: Option<u64>,
}

impl Provenance {
    pub fn new<T: Serialize>(command: &str, config: &T, seed: Option<u64>) -> Provenance {
        Provenance {
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            seed,
        }
    }

    fn json(&self) -> Value {
        json!({
            "tool": "mfqec",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "tolerances": {
                "classification_overlap": CLASSIFY_THRESHOLD,
                "code_space": 1.0 - 1e-8,
                "branch_threshold": DEFAULT_BRANCH_THRESHOLD,
            },
        })
    }

    fn header(&self) -> String {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("# {}\n# generated_unix: {now}\n", self.json())
    }
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

pub fn write_csv<R: Serialize>(path: &Path, prov: &Provenance, rows: &[R]) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(prov.header().as_bytes())?;
    let mut w = csv::Writer::from_writer(f);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, prov: &Provenance, body: &Value) -> Result<()> {
    let doc = json!({ "provenance": prov.json(), "result": body });
    std::fs::write(path, serde_json::to_string_pretty(&doc)?)
        .with_context(|| format!("writing {}", path.display()))
}

pub fn write_json_rows(path: &Path, prov: &Provenance, rows: &[Value]) -> Result<()> {
    write_json(path, prov, &Value::Array(rows.to_vec()))
}

pub fn write_text(path: &Path, prov: &Provenance, text: &str) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(prov.header().as_bytes())?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
