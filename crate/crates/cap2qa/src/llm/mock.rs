use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Mutex;

use cap2qa_core::{AssistantRequest, Digest256};
use serde::{Deserialize, Serialize};

use super::{Backend, CallError};
use crate::error::{Error, Result};
use crate::jsonl::{open, parse_line};

/// One line of a mock script file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    /// Hex SHA-256 of the rendered prompt. Absent means "next in order".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_hash: Option<String>,
    pub response_text: String,
}

/// Hex SHA-256 of a prompt, as used in script files.
pub fn prompt_hash(prompt_text: &str) -> String {
    Digest256::of(prompt_text.as_bytes()).to_hex()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MockScript {
    pub entries: Vec<ScriptEntry>,
}

impl MockScript {
    pub fn ordered<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        MockScript {
            entries: responses
                .into_iter()
                .map(|r| ScriptEntry { prompt_hash: None, response_text: r.into() })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let reader = BufReader::new(open(path)?);
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: ScriptEntry = parse_line(path, i + 1, &line)?;
            if let Some(h) = &entry.prompt_hash {
                if Digest256::from_hex(h).is_none() {
                    return Err(Error::SchemaViolation {
                        path: path.to_path_buf(),
                        index: i + 1,
                        message: format!("line {}: prompt_hash is not 64 hex digits", i + 1),
                    });
                }
            }
            entries.push(entry);
        }
        Ok(MockScript { entries })
    }
}

/// Replays a script. Hashed entries answer their prompt; the n-th entry
/// for a hash is sample n-1, so retries see successive entries. Unhashed
/// entries are handed out in file order to prompts without a hashed entry.
#[derive(Debug)]
pub struct MockBackend {
    by_hash: HashMap<String, Vec<String>>,
    queue: Mutex<VecDeque<String>>,
}

impl MockBackend {
    pub fn new(script: MockScript) -> Self {
        let mut by_hash: HashMap<String, Vec<String>> = HashMap::new();
        let mut queue = VecDeque::new();
        for entry in script.entries {
            match entry.prompt_hash {
                Some(h) => by_hash.entry(h.to_ascii_lowercase()).or_default().push(entry.response_text),
                None => queue.push_back(entry.response_text),
            }
        }
        MockBackend { by_hash, queue: Mutex::new(queue) }
    }
}

impl Backend for MockBackend {
    fn call(&self, request: &AssistantRequest) -> std::result::Result<String, CallError> {
        if let Some(samples) = self.by_hash.get(&prompt_hash(&request.prompt_text)) {
            return samples.get(request.sample as usize).cloned().ok_or(CallError::Exhausted);
        }
        self.queue.lock().unwrap().pop_front().ok_or(CallError::Exhausted)
    }
}
