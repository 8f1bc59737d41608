//! Line-delimited JSON reports, one record per stage.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Keys holding wall-clock data; everything else is deterministic.
pub const TIMING_KEYS: [&str; 1] = ["elapsed_ms"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub records: Vec<Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `{schema_version, stage, ...payload}`; `payload` must serialize to an object.
    pub fn push(&mut self, stage: &str, payload: impl Serialize) {
        let mut obj = Map::new();
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
        obj.insert("stage".into(), json!(stage));
        match serde_json::to_value(payload).unwrap_or(Value::Null) {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("value".into(), other);
            }
        }
        self.records.push(Value::Object(obj));
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn stage(&self, name: &str) -> Option<&Value> {
        self.records.iter().find(|r| r["stage"] == name)
    }

    pub fn stages<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Value> + 'a {
        self.records.iter().filter(move |r| r["stage"] == name)
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("json value"));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)
            .with_context(|| format!("cannot create report `{}`", path.display()))?;
        f.write_all(self.to_jsonl().as_bytes())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("report line {}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { records })
    }

    /// The report with every timing field removed.
    pub fn without_timings(&self) -> Self {
        fn strip(v: &Value) -> Value {
            match v {
                Value::Object(m) => Value::Object(
                    m.iter()
                        .filter(|(k, _)| !TIMING_KEYS.contains(&k.as_str()))
                        .map(|(k, v)| (k.clone(), strip(v)))
                        .collect(),
                ),
                Value::Array(a) => Value::Array(a.iter().map(strip).collect()),
                other => other.clone(),
            }
        }
        Self {
            records: self.records.iter().map(strip).collect(),
        }
    }
}

/// JSON has no infinities or NaN; they are written as strings.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_carry_schema_and_stage() {
        let mut r = Report::new();
        r.push("solve", json!({"status": "OPTIMAL", "elapsed_ms": 3}));
        let back = Report::parse(&r.to_jsonl()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.records[0]["schema_version"], 1);
        assert!(back.without_timings().records[0].get("elapsed_ms").is_none());
    }
}
