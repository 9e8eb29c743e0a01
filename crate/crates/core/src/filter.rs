//! Artifact filtering: reject generated pairs that only make sense to a
//! reader of the caption, not to someone looking at the image.
//!
//! Rules are data. Each rule is a case-insensitive regular expression
//! applied to the Unicode-lowercased question, answer, or either. A pattern
//! made of a single word (letters, digits, underscores) is anchored on word
//! boundaries, so `caption` does not fire on `captioning`.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use crate::parse::QAPair;

pub const MENTIONS_CAPTION: &str = "mentions-caption";
pub const NON_SPECIFICATION_EXCUSE: &str = "non-specification-excuse";
pub const EMPTY_FIELD: &str = "empty-field";
pub const META_REFUSAL: &str = "meta-refusal";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Question,
    Answer,
    Either,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRule {
    pub rule_id: String,
    pub scope: Scope,
    pub pattern: String,
    #[serde(default)]
    pub description: String,
}

impl FilterRule {
    pub fn new(rule_id: &str, scope: Scope, pattern: &str, description: &str) -> Self {
        FilterRule { rule_id: rule_id.into(), scope, pattern: pattern.into(), description: description.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleError {
    InvalidPattern { rule_id: String, message: String },
    DuplicateRuleId(String),
    EmptyRuleSet,
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleError::InvalidPattern { rule_id, message } => {
                write!(f, "rule `{rule_id}` has an invalid pattern: {message}")
            }
            RuleError::DuplicateRuleId(id) => write!(f, "rule id `{id}` appears more than once"),
            RuleError::EmptyRuleSet => f.write_str("rule set is empty"),
        }
    }
}

impl core::error::Error for RuleError {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub pair: QAPair,
    pub rule_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: Vec<QAPair>,
    pub rejected: Vec<Rejection>,
    pub input_count: usize,
}

#[derive(Debug, Clone)]
struct CompiledRule {
    rule: FilterRule,
    regex: Regex,
}

/// A validated, compiled, ordered list of rules.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<CompiledRule>,
}

pub fn default_rules() -> Vec<FilterRule> {
    alloc::vec![
        FilterRule::new(
            MENTIONS_CAPTION,
            Scope::Either,
            "caption",
            "question or answer refers to the caption instead of the image",
        ),
        FilterRule::new(
            NON_SPECIFICATION_EXCUSE,
            Scope::Either,
            r"\b(?:not specified|according to the caption|in the caption)\b",
            "excuse that the source text does not say",
        ),
        FilterRule::new(EMPTY_FIELD, Scope::Either, r"^\s*$", "blank question or answer"),
        FilterRule::new(
            META_REFUSAL,
            Scope::Answer,
            r"^\s*(?:as an ai|i cannot)\b",
            "assistant refusal or self-reference",
        ),
    ]
}

fn is_single_word(pattern: &str) -> bool {
    !pattern.is_empty() && pattern.chars().all(|c| c.is_alphanumeric() || c == '_')
}

impl RuleSet {
    pub fn new(rules: Vec<FilterRule>) -> Result<Self, RuleError> {
        if rules.is_empty() {
            return Err(RuleError::EmptyRuleSet);
        }
        let mut seen = BTreeSet::new();
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in rules {
            if !seen.insert(rule.rule_id.clone()) {
                return Err(RuleError::DuplicateRuleId(rule.rule_id));
            }
            let source = if is_single_word(&rule.pattern) {
                alloc::format!(r"\b{}\b", rule.pattern)
            } else {
                rule.pattern.clone()
            };
            let regex = RegexBuilder::new(&source)
                .case_insensitive(true)
                .build()
                .map_err(|e| RuleError::InvalidPattern { rule_id: rule.rule_id.clone(), message: e.to_string() })?;
            compiled.push(CompiledRule { rule, regex });
        }
        Ok(RuleSet { rules: compiled })
    }

    pub fn default_rules() -> Self {
        RuleSet::new(default_rules()).expect("default rules compile")
    }

    pub fn rules(&self) -> impl Iterator<Item = &FilterRule> {
        self.rules.iter().map(|c| &c.rule)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Id of the first rule (in rule order) matching the pair, if any.
    pub fn first_match(&self, pair: &QAPair) -> Option<&str> {
        let question = pair.question.to_lowercase();
        let answer = pair.answer.to_lowercase();
        self.rules
            .iter()
            .find(|c| match c.rule.scope {
                Scope::Question => c.regex.is_match(&question),
                Scope::Answer => c.regex.is_match(&answer),
                Scope::Either => c.regex.is_match(&question) || c.regex.is_match(&answer),
            })
            .map(|c| c.rule.rule_id.as_str())
    }

    pub fn filter_artifacts(&self, pairs: &[QAPair]) -> FilterReport {
        let mut report = FilterReport { input_count: pairs.len(), ..FilterReport::default() };
        for pair in pairs {
            match self.first_match(pair) {
                Some(rule_id) => report.rejected.push(Rejection { pair: pair.clone(), rule_id: rule_id.into() }),
                None => report.kept.push(pair.clone()),
            }
        }
        report
    }
}
