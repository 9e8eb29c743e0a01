//! Caption similarity metrics: corpus BLEU-1..4 and CIDEr.
//!
//! Both tokenize by lowercasing and splitting on non-alphanumerics. CIDEr
//! additionally Porter-stems every token.

mod bleu;
mod cider;
mod stem;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use bleu::{bleu, bleu_default, modified_precisions};
pub use cider::{cider, CiderVariant};
pub use stem::porter_stem;

pub use crate::lexicon::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionItem {
    pub image_id: u64,
    pub candidate: String,
    pub references: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CaptionEvalSet {
    pub items: Vec<CaptionItem>,
}

impl CaptionEvalSet {
    pub fn new(items: Vec<CaptionItem>) -> Self {
        CaptionEvalSet { items }
    }

    fn check(&self) -> Result<(), CaptionMetricError> {
        if self.items.is_empty() {
            return Err(CaptionMetricError::EmptyCorpus);
        }
        if let Some(item) = self.items.iter().find(|i| i.references.is_empty()) {
            return Err(CaptionMetricError::NoReferences(item.image_id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptionScores {
    pub bleu: [f64; 4],
    pub cider: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaptionMetricError {
    EmptyCorpus,
    /// Document frequencies over a single item make every IDF zero.
    SingletonCorpus,
    NoReferences(u64),
    InvalidOrder(usize),
}

impl fmt::Display for CaptionMetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaptionMetricError::EmptyCorpus => f.write_str("caption corpus is empty"),
            CaptionMetricError::SingletonCorpus => {
                f.write_str("CIDEr needs at least two items; document frequencies degenerate")
            }
            CaptionMetricError::NoReferences(id) => write!(f, "image {id} has no reference captions"),
            CaptionMetricError::InvalidOrder(n) => write!(f, "n-gram order {n} outside 1..=4"),
        }
    }
}

impl core::error::Error for CaptionMetricError {}

pub fn caption_scores(set: &CaptionEvalSet, variant: CiderVariant) -> Result<CaptionScores, CaptionMetricError> {
    Ok(CaptionScores { bleu: bleu_default(set)?, cider: cider(set, variant)? })
}
