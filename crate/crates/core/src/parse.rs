//! Parsing raw assistant text into question-answer pairs.

use alloc::string::String;
use alloc::vec::Vec;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QAPair {
    pub question: String,
    pub answer: String,
}

impl QAPair {
    pub fn new(question: impl Into<String>, answer: impl Into<String>) -> Self {
        QAPair { question: question.into(), answer: answer.into() }
    }
}

// Optional list numbering ("1.", "2)"), optional markdown emphasis, then the
// marker word and a colon.
const MARKER: &str = r"(?i)(?:\b\d{1,3}[.)]\s*)?(?:\*{1,2}|_{1,2})?\b(question|answer)(?:\s*\d{1,3})?\s*(?:\*{1,2}|_{1,2})?\s*:(?:\s*(?:\*{1,2}|_{1,2})(?:\s|$))?";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Marker {
    Question,
    Answer,
}

/// Scan for alternating `Question:` / `Answer:` markers.
///
/// Text before the first marker is ignored, each question pairs with the
/// next answer, an answer without a pending question is dropped, and a
/// trailing unanswered question is dropped. Markers may be separated by
/// newlines or commas. Unparseable text yields an empty list.
pub fn parse_qas(raw: &str) -> Vec<QAPair> {
    QaParser::new().parse(raw)
}

/// Reusable parser holding the compiled marker pattern.
#[derive(Debug, Clone)]
pub struct QaParser {
    marker: Regex,
}

impl Default for QaParser {
    fn default() -> Self {
        Self::new()
    }
}

impl QaParser {
    pub fn new() -> Self {
        QaParser { marker: Regex::new(MARKER).expect("marker pattern compiles") }
    }

    /// See [`parse_qas`].
    pub fn parse(&self, raw: &str) -> Vec<QAPair> {
        parse_with(&self.marker, raw)
    }
}

fn parse_with(re: &Regex, raw: &str) -> Vec<QAPair> {
    let mut marks: Vec<(Marker, usize, usize)> = Vec::new();
    for caps in re.captures_iter(raw) {
        let whole = caps.get(0).expect("group 0");
        let kind = if caps[1].eq_ignore_ascii_case("question") { Marker::Question } else { Marker::Answer };
        marks.push((kind, whole.start(), whole.end()));
    }

    let mut pairs = Vec::new();
    let mut pending: Option<String> = None;
    for (i, &(kind, _, body_start)) in marks.iter().enumerate() {
        let body_end = marks.get(i + 1).map_or(raw.len(), |m| m.1);
        let body = clean_body(&raw[body_start..body_end]);
        match kind {
            Marker::Question => pending = Some(body),
            Marker::Answer => {
                if let Some(question) = pending.take() {
                    pairs.push(QAPair { question, answer: body });
                }
            }
        }
    }
    pairs
}

fn clean_body(body: &str) -> String {
    let trimmed = body.trim_matches(|c: char| c.is_whitespace() || c == ',' || c == ';');
    let trimmed = trimmed.trim_end_matches(|c: char| c.is_whitespace() || c == '-' || c == '*');
    String::from(trimmed.trim())
}
