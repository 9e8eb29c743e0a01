//! Line-delimited JSON: the instruction dataset and the evaluation inputs.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use cap2qa_core::corpus::QaRow;
use cap2qa_core::InstructionRecord;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::coco::{parse_document, read_bytes};
use crate::error::{Error, Result};

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

/// Serialize one value as a JSON line, newline included.
pub fn to_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut line = serde_json::to_vec(value).expect("record types always serialize");
    line.push(b'\n');
    line
}

/// Parse one line. Syntax errors are `MalformedLine`; well-formed JSON of
/// the wrong shape is `SchemaViolation` with the line number as index.
pub fn parse_line<T: DeserializeOwned>(path: &Path, line_no: usize, line: &str) -> Result<T> {
    serde_json::from_str(line).map_err(|e| {
        if e.is_data() {
            Error::SchemaViolation { path: path.to_path_buf(), index: line_no, message: format!("line {line_no}: {e}") }
        } else {
            Error::MalformedLine { path: path.to_path_buf(), line: line_no, message: e.to_string() }
        }
    })
}

/// Every non-blank line of `path`, parsed. Line numbers are 1-based.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(path, i + 1, &line)?);
    }
    Ok(out)
}

/// One JSON object per line with keys in the fixed order image_id,
/// question, answer, source_caption_ids, provenance.
pub fn write_instructions(path: &Path, records: &[InstructionRecord]) -> Result<usize> {
    let mut w = BufWriter::new(create(path)?);
    for record in records {
        w.write_all(&to_line(record)).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(records.len())
}

pub(crate) fn check_record(path: &Path, line_no: usize, r: &InstructionRecord) -> Result<()> {
    let problem = if r.question.trim().is_empty() {
        Some("question is empty")
    } else if r.answer.trim().is_empty() {
        Some("answer is empty")
    } else if r.provenance.attempt < 1 {
        Some("provenance.attempt must be at least 1")
    } else {
        None
    };
    match problem {
        Some(p) => Err(Error::SchemaViolation {
            path: path.to_path_buf(),
            index: line_no,
            message: format!("line {line_no}: {p}"),
        }),
        None => Ok(()),
    }
}

/// Inverse of [`write_instructions`].
pub fn read_instructions(path: &Path) -> Result<Vec<InstructionRecord>> {
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: InstructionRecord = parse_line(path, i + 1, &line)?;
        check_record(path, i + 1, &record)?;
        out.push(record);
    }
    Ok(out)
}

/// The three fields statistics need. Other keys are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct QaLine {
    pub image_id: u64,
    pub question: String,
    pub answer: String,
}

impl QaRow for QaLine {
    fn image_id(&self) -> u64 {
        self.image_id
    }
    fn question(&self) -> &str {
        &self.question
    }
    fn answer(&self) -> &str {
        &self.answer
    }
}

/// Question-answer rows from either JSONL or a single JSON array.
pub fn read_qa_rows(path: &Path) -> Result<Vec<QaLine>> {
    let bytes = read_bytes(path)?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    if first == Some(&b'[') {
        return parse_document(path, &bytes);
    }
    read_jsonl(path)
}
