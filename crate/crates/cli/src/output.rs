use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

/// Run metadata echoed into every output.
pub struct Meta {
    pub command: &'static str,
    pub seed: u64,
    pub tol: f64,
    pub input: Option<String>,
    pub timestamp: bool,
}

impl Meta {
    fn fields(&self) -> Vec<(&'static str, Value)> {
        let mut out = vec![("command", json!(self.command)), ("seed", json!(self.seed)), ("tol", json!(self.tol))];
        if let Some(input) = &self.input {
            out.push(("input", json!(input)));
        }
        if self.timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            out.push(("timestamp_unix", json!(secs)));
        }
        out
    }

    pub fn json(&self) -> Value {
        Value::Object(self.fields().into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
    }

    /// `# key=value` lines for CSV output.
    pub fn csv_header(&self) -> String {
        self.fields().into_iter().map(|(k, v)| format!("# {k}={}\n", plain(&v))).collect()
    }

    pub fn markdown_header(&self) -> String {
        let parts: Vec<String> = self.fields().into_iter().map(|(k, v)| format!("{k}: `{}`", plain(&v))).collect();
        format!("{}\n\n", parts.join(", "))
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Wraps a JSON result with the metadata block.
pub fn with_meta(meta: &Meta, result: Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "meta": meta.json(), "result": result })).expect("serializable");
    s.push('\n');
    s
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn markdown_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s =
        format!("| {} |\n|{}|\n", header.join(" | "), header.iter().map(|_| "---").collect::<Vec<_>>().join("|"));
    for row in rows {
        s.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    s
}

pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header)?;
    for row in rows {
        wtr.write_record(row)?;
    }
    Ok(String::from_utf8(wtr.into_inner()?)?)
}
