#![allow(dead_code)]

use std::path::Path;

use cap2qa::llm::{prompt_hash, ScriptEntry};
use cap2qa_core::{default_prompt_config, CaptionRecord, PromptConfig, Split};
use serde_json::json;

pub const CLEAN: &str = "Question: What is on the table? Answer: A plate of food.";
pub const FILTERED: &str =
    "Question: What kind of dessert is in the caption? Answer: There is no dessert mentioned according to the caption.";

pub fn captions(n: u64) -> Vec<CaptionRecord> {
    (0..n)
        .map(|i| CaptionRecord {
            caption_id: 1000 + i,
            image_id: 10 + i / 2,
            text: format!("A dog number {i} runs across the grass near a red ball."),
            split: Split::Val,
        })
        .collect()
}

pub fn write_caption_file(path: &Path, captions: &[CaptionRecord]) {
    let annotations: Vec<_> =
        captions.iter().map(|c| json!({"id": c.caption_id, "image_id": c.image_id, "caption": c.text})).collect();
    let doc = json!({"info": {}, "images": [], "annotations": annotations});
    std::fs::write(path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
}

pub fn hash_for(prompt: &PromptConfig, caption: &CaptionRecord) -> String {
    prompt_hash(&prompt.render(caption).unwrap().rendered)
}

/// Hashed script entries: `responses(caption)` gives the samples in order.
pub fn hashed_script<F>(captions: &[CaptionRecord], mut responses: F) -> Vec<ScriptEntry>
where
    F: FnMut(&CaptionRecord) -> Vec<String>,
{
    let prompt = default_prompt_config();
    let mut entries = Vec::new();
    for c in captions {
        let h = hash_for(&prompt, c);
        for text in responses(c) {
            entries.push(ScriptEntry { prompt_hash: Some(h.clone()), response_text: text });
        }
    }
    entries
}

pub fn write_script(path: &Path, entries: &[ScriptEntry]) {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(e).unwrap());
        out.push('\n');
    }
    std::fs::write(path, out).unwrap();
}

pub fn clean_for(c: &CaptionRecord) -> String {
    format!("Question: What is the dog in scene {} chasing? Answer: A red ball.", c.caption_id)
}
