use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};

use hammerloc::solve::{IterationRecord, SolveResult};
use hammerloc::GridFunction;

/// Adds the problem name and, unless suppressed, the wall-clock time.
pub fn stamp(value: Value, problem: &str, timestamp: bool) -> Value {
    let mut map = match value {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    map.insert("problem".into(), json!(problem));
    if timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        map.insert("generated_at_unix".into(), json!(secs));
    }
    Value::Object(map)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}

/// Plot-ready table with header `t,u,v`.
pub fn solution_csv(u: &GridFunction, v: &GridFunction) -> String {
    let mut out = String::from("t,u,v\n");
    for (i, t) in u.ts().enumerate() {
        let _ = writeln!(out, "{t},{},{}", u.values()[i], v.values()[i]);
    }
    out
}

/// The result without its iteration log, plus the grid and both components.
pub fn solution_json(res: &SolveResult) -> Result<Value> {
    let mut value = serde_json::to_value(res)?;
    if let Value::Object(m) = &mut value {
        m.remove("history");
        m.insert("t".into(), json!(res.u.ts().collect::<Vec<f64>>()));
        m.insert("u".into(), json!(res.u.values()));
        m.insert("v".into(), json!(res.v.values()));
    }
    Ok(value)
}

/// One JSON object per line.
pub fn iterations_jsonl(history: &[IterationRecord]) -> Result<String> {
    let mut out = String::new();
    for rec in history {
        out.push_str(&serde_json::to_string(rec)?);
        out.push('\n');
    }
    Ok(out)
}
