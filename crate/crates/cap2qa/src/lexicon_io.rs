//! Building a [`Lexicon`] from files, with the COCO vocabulary shipped in
//! the binary as the fallback.

use std::fs;
use std::path::{Path, PathBuf};

use cap2qa_core::lexicon::LexiconError;
use cap2qa_core::Lexicon;

use crate::error::{Error, Result};

pub const DEFAULT_CATEGORIES: &str = include_str!("../data/coco_categories.txt");
pub const DEFAULT_SYNONYMS: &str = include_str!("../data/synonyms.txt");

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Categories default to the 80 COCO classes; synonyms default to the
/// shipped table when no categories file is given and to none otherwise.
pub fn build_lexicon(categories: Option<&Path>, synonyms: Option<&Path>) -> Result<Lexicon> {
    let categories_text = match categories {
        Some(p) => read_text(p)?,
        None => DEFAULT_CATEGORIES.to_owned(),
    };
    let synonyms_text = match (categories, synonyms) {
        (_, Some(p)) => read_text(p)?,
        (None, None) => DEFAULT_SYNONYMS.to_owned(),
        (Some(_), None) => String::new(),
    };
    Lexicon::from_texts(&categories_text, &synonyms_text).map_err(|source| {
        let blame = match (&source, categories, synonyms) {
            (LexiconError::DuplicateCategory(_), Some(c), _) => c.to_path_buf(),
            (LexiconError::DuplicateCategory(_), None, _) => PathBuf::from("<builtin categories>"),
            (_, _, Some(s)) => s.to_path_buf(),
            (_, None, None) => PathBuf::from("<builtin synonyms>"),
            (_, Some(c), None) => c.to_path_buf(),
        };
        Error::Lexicon { path: blame, source }
    })
}

pub fn default_lexicon() -> Lexicon {
    Lexicon::from_texts(DEFAULT_CATEGORIES, DEFAULT_SYNONYMS).expect("shipped lexicon is valid")
}
