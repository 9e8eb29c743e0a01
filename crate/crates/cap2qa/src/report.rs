//! Machine-readable run reports and their markdown rendering.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub tool_version: String,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub inputs: BTreeMap<String, InputDigest>,
    pub metrics: BTreeMap<String, f64>,
    #[serde(default)]
    pub details: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_lower(&hasher.finalize()))
}

fn hex_lower(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: &str, started_at: DateTime<Utc>) -> Self {
        Report {
            command: command.to_owned(),
            tool_version: TOOL_VERSION.to_owned(),
            started_at,
            finished_at: started_at,
            inputs: BTreeMap::new(),
            metrics: BTreeMap::new(),
            details: Value::Null,
        }
    }

    pub fn add_input(&mut self, name: &str, path: &Path) -> Result<()> {
        let sha256 = sha256_file(path)?;
        self.inputs.insert(name.to_owned(), InputDigest { path: path.display().to_string(), sha256 });
        Ok(())
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_owned(), value);
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = crate::coco::read_bytes(path)?;
        crate::coco::parse_document(path, &bytes)
    }
}

/// Display label and row position for known metric names.
const LABELS: &[(&str, &str)] = &[
    ("chair_s", "CHAIR_s"),
    ("recall", "Recall"),
    ("recall_wo_h", "Recall_w/oH"),
    ("pacc", "PAcc"),
    ("acc", "Acc"),
    ("bleu_1", "BLEU-1"),
    ("bleu_2", "BLEU-2"),
    ("bleu_3", "BLEU-3"),
    ("bleu_4", "BLEU-4"),
    ("cider", "CIDEr"),
    ("cider_d", "CIDEr-D"),
];

fn metric_rows(metrics: &BTreeMap<String, f64>) -> Vec<(String, f64)> {
    let mut rows: Vec<(String, f64)> =
        LABELS.iter().filter_map(|(key, label)| metrics.get(*key).map(|v| ((*label).to_owned(), *v))).collect();
    rows.extend(metrics.iter().filter(|(k, _)| !LABELS.iter().any(|(key, _)| key == k)).map(|(k, v)| (k.clone(), *v)));
    rows
}

fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.4}")
    }
}

/// JSON output has sorted keys at every level, so equal reports render to
/// equal bytes.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let value = serde_json::to_value(report).expect("report serializes");
            let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
            s.push('\n');
            s
        }
        Format::Markdown => {
            let mut s = format!("## {}\n\n| Metric | Value |\n|---|---|\n", report.command);
            for (label, value) in metric_rows(&report.metrics) {
                s.push_str(&format!("| {label} | {} |\n", format_value(value)));
            }
            s
        }
    }
}

pub fn write_or_print(report: &Report, path: Option<&Path>) -> Result<()> {
    let text = render(report, Format::Json);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            use io::Write;
            io::stdout().write_all(text.as_bytes()).map_err(|e| Error::io(Path::new("<stdout>"), e))
        }
    }
}
