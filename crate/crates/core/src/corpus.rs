//! Ground-truth and generated-record types shared by the loaders, the
//! generator and the evaluators.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            other => Err(alloc::format!("unknown split `{other}` (expected train or val)")),
        }
    }
}

/// One human-written caption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionRecord {
    pub caption_id: u64,
    pub image_id: u64,
    pub text: String,
    pub split: Split,
}

/// Closed-vocabulary object labels for one image.
///
/// `positive ∪ negative` is the vocabulary and the two sets are disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectAnnotation {
    pub image_id: u64,
    pub positive_categories: BTreeSet<String>,
    pub negative_categories: BTreeSet<String>,
}

impl ObjectAnnotation {
    /// Negatives are the vocabulary minus the positives. Positives outside
    /// the vocabulary are dropped.
    pub fn from_positives<'a, I>(image_id: u64, positives: I, vocabulary: &[String]) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let wanted: BTreeSet<&str> = positives.into_iter().collect();
        let mut positive_categories = BTreeSet::new();
        let mut negative_categories = BTreeSet::new();
        for name in vocabulary {
            if wanted.contains(name.as_str()) {
                positive_categories.insert(name.clone());
            } else {
                negative_categories.insert(name.clone());
            }
        }
        ObjectAnnotation { image_id, positive_categories, negative_categories }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub model_id: String,
    pub prompt_version: String,
    /// 1-based retry-loop iteration that produced the record.
    pub attempt: u32,
    pub created_at: DateTime<Utc>,
}

/// A generated question-answer pair with its provenance.
///
/// Field order is the on-disk key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionRecord {
    pub image_id: u64,
    pub question: String,
    pub answer: String,
    pub source_caption_ids: Vec<u64>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_records: u64,
    pub n_distinct_images: u64,
    pub avg_answer_words: f64,
    pub avg_question_words: f64,
}

/// Whitespace-token count after trimming.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Anything that carries an image id, a question and an answer.
pub trait QaRow {
    fn image_id(&self) -> u64;
    fn question(&self) -> &str;
    fn answer(&self) -> &str;
}

impl QaRow for InstructionRecord {
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

pub fn dataset_stats<R: QaRow>(records: &[R]) -> DatasetStats {
    if records.is_empty() {
        return DatasetStats { n_records: 0, n_distinct_images: 0, avg_answer_words: 0.0, avg_question_words: 0.0 };
    }
    let mut images = BTreeSet::new();
    let mut answer_words = 0u64;
    let mut question_words = 0u64;
    for r in records {
        images.insert(r.image_id());
        answer_words += word_count(r.answer()) as u64;
        question_words += word_count(r.question()) as u64;
    }
    let n = records.len() as f64;
    DatasetStats {
        n_records: records.len() as u64,
        n_distinct_images: images.len() as u64,
        avg_answer_words: answer_words as f64 / n,
        avg_question_words: question_words as f64 / n,
    }
}
