//! Closed object vocabulary with surface-form synonyms, and mention
//! extraction over free text.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconError {
    DuplicateSurfaceForm { form: String, first: String, second: String },
    UnknownCategory { category: String, line: usize },
    DuplicateCategory(String),
    EmptySurfaceForm { category: String },
}

impl fmt::Display for LexiconError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconError::DuplicateSurfaceForm { form, first, second } => {
                write!(f, "surface form `{form}` maps to both `{first}` and `{second}`")
            }
            LexiconError::UnknownCategory { category, line } => {
                write!(f, "line {line}: unknown category `{category}`")
            }
            LexiconError::DuplicateCategory(c) => write!(f, "category `{c}` listed twice"),
            LexiconError::EmptySurfaceForm { category } => {
                write!(f, "empty surface form for category `{category}`")
            }
        }
    }
}

impl core::error::Error for LexiconError {}

/// Lowercase and split on anything that is not alphanumeric.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(ToString::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    categories: Vec<String>,
    synonyms: BTreeMap<String, BTreeSet<String>>,
    forms: BTreeMap<String, String>,
    longest_form: usize,
}

impl Lexicon {
    /// Every category is its own surface form; `extra_forms` are
    /// `(surface form, category)` pairs.
    pub fn new<I>(categories: Vec<String>, extra_forms: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut lexicon =
            Lexicon { categories: Vec::new(), synonyms: BTreeMap::new(), forms: BTreeMap::new(), longest_form: 0 };
        for category in categories {
            let category = category.trim().to_string();
            if lexicon.synonyms.contains_key(&category) {
                return Err(LexiconError::DuplicateCategory(category));
            }
            lexicon.synonyms.insert(category.clone(), BTreeSet::new());
            lexicon.categories.push(category.clone());
            lexicon.add_form(&category.clone(), &category)?;
        }
        for (form, category) in extra_forms {
            if !lexicon.synonyms.contains_key(category.trim()) {
                return Err(LexiconError::UnknownCategory { category, line: 0 });
            }
            lexicon.add_form(&form, category.trim())?;
        }
        Ok(lexicon)
    }

    /// Parse a category list (one name per line) and a synonym table (one
    /// line per category: `category, form, form, ...`). Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_texts(categories_text: &str, synonyms_text: &str) -> Result<Self, LexiconError> {
        let categories: Vec<String> = content_lines(categories_text).map(|(_, l)| l.to_string()).collect();
        let known: BTreeSet<&str> = categories.iter().map(String::as_str).collect();
        let mut extra = Vec::new();
        for (line_no, line) in content_lines(synonyms_text) {
            let mut parts = line.split(',').map(str::trim);
            let category = parts.next().unwrap_or_default();
            if !known.contains(category) {
                return Err(LexiconError::UnknownCategory { category: category.to_string(), line: line_no });
            }
            for form in parts.filter(|p| !p.is_empty()) {
                extra.push((form.to_string(), category.to_string()));
            }
        }
        Lexicon::new(categories, extra)
    }

    fn add_form(&mut self, raw_form: &str, category: &str) -> Result<(), LexiconError> {
        let tokens = tokenize(raw_form);
        if tokens.is_empty() {
            return Err(LexiconError::EmptySurfaceForm { category: category.to_string() });
        }
        let form = tokens.join(" ");
        match self.forms.get(&form) {
            Some(existing) if existing != category => {
                Err(LexiconError::DuplicateSurfaceForm { form, first: existing.clone(), second: category.to_string() })
            }
            Some(_) => Ok(()),
            None => {
                self.longest_form = self.longest_form.max(tokens.len());
                self.forms.insert(form.clone(), category.to_string());
                self.synonyms.get_mut(category).expect("category registered").insert(form);
                Ok(())
            }
        }
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn contains_category(&self, name: &str) -> bool {
        self.synonyms.contains_key(name)
    }

    /// Surface forms of a category, including its own name.
    pub fn surface_forms(&self, category: &str) -> Option<&BTreeSet<String>> {
        self.synonyms.get(category)
    }

    /// Category of an exact (already tokenized and space-joined) form.
    pub fn resolve(&self, form: &str) -> Option<&str> {
        self.forms.get(form).map(String::as_str)
    }

    fn resolve_window(&self, window: &[String]) -> Option<&str> {
        let joined = window.join(" ");
        if let Some(c) = self.resolve(&joined) {
            return Some(c);
        }
        let last = window.last()?;
        let head = &joined[..joined.len() - last.len()];
        for suffix in ["s", "es"] {
            if let Some(stem) = last.strip_suffix(suffix) {
                if stem.is_empty() {
                    continue;
                }
                let mut candidate = String::from(head);
                candidate.push_str(stem);
                if let Some(c) = self.resolve(&candidate) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Categories mentioned in `text`. Longer surface forms win over the
    /// shorter forms they contain, so "hot dog" is not also a dog.
    pub fn extract_objects(&self, text: &str) -> BTreeSet<String> {
        let tokens = tokenize(text);
        let mut found = BTreeSet::new();
        let mut i = 0;
        while i < tokens.len() {
            let max = self.longest_form.min(tokens.len() - i);
            let mut advanced = false;
            for len in (1..=max).rev() {
                if let Some(category) = self.resolve_window(&tokens[i..i + len]) {
                    found.insert(category.to_string());
                    i += len;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                i += 1;
            }
        }
        found
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}
