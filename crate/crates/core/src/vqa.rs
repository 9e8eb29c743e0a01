//! VQA accuracy in two flavours sharing one formula, `min(1, matches / 3)`:
//! exact match (Acc) and substring match (PAcc), where a ground truth counts
//! when it occurs anywhere inside the prediction.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::hallucination::{ratio_or_zero, to_f64};

const ARTICLES: [&str; 3] = ["a", "an", "the"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeMode {
    /// Articles removed.
    Exact,
    /// Articles kept.
    Substring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scorer {
    Pacc,
    Acc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Matching {
    #[default]
    Normalized,
    /// Compare strings exactly as given.
    Raw,
}

/// Lowercase, collapse whitespace and strip punctuation from both ends of
/// every token. Tokens that are pure punctuation disappear.
pub fn normalize(text: &str, mode: NormalizeMode) -> String {
    let lowered = text.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    for token in lowered.split_whitespace() {
        let token = token.trim_matches(|c: char| !c.is_alphanumeric());
        if token.is_empty() {
            continue;
        }
        if mode == NormalizeMode::Exact && ARTICLES.contains(&token) {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(token);
    }
    out
}

fn contains_nonempty(haystack: &str, needle: &str) -> bool {
    !needle.is_empty() && haystack.contains(needle)
}

/// A single ground truth matches the prediction in PAcc.
///
/// Under normalized matching the ground truth is looked for inside the
/// prediction twice: with articles kept, and with articles removed from
/// both. Either hit counts, so every exact match is also a substring match.
pub fn pacc_matches(ground_truth: &str, prediction: &str, matching: Matching) -> bool {
    match matching {
        Matching::Raw => contains_nonempty(prediction, ground_truth),
        Matching::Normalized => {
            contains_nonempty(
                &normalize(prediction, NormalizeMode::Substring),
                &normalize(ground_truth, NormalizeMode::Substring),
            ) || contains_nonempty(
                &normalize(prediction, NormalizeMode::Exact),
                &normalize(ground_truth, NormalizeMode::Exact),
            )
        }
    }
}

pub fn acc_matches(ground_truth: &str, prediction: &str, matching: Matching) -> bool {
    match matching {
        Matching::Raw => !ground_truth.is_empty() && ground_truth == prediction,
        Matching::Normalized => {
            let gt = normalize(ground_truth, NormalizeMode::Exact);
            !gt.is_empty() && gt == normalize(prediction, NormalizeMode::Exact)
        }
    }
}

fn min_one_third(matches: usize) -> Ratio<u64> {
    Ratio::new(matches.min(3) as u64, 3)
}

/// `min(1, matches / 3)` where a match is a ground truth contained in the
/// prediction. Each ground-truth entry counts at most once.
pub fn pacc_score(ground_truths: &[String], prediction: &str) -> Ratio<u64> {
    score_with(Scorer::Pacc, ground_truths, prediction, Matching::Normalized)
}

/// `min(1, matches / 3)` where a match is a ground truth equal to the
/// prediction.
pub fn acc_score(ground_truths: &[String], prediction: &str) -> Ratio<u64> {
    score_with(Scorer::Acc, ground_truths, prediction, Matching::Normalized)
}

pub fn score_with(scorer: Scorer, ground_truths: &[String], prediction: &str, matching: Matching) -> Ratio<u64> {
    let matches = match (scorer, matching) {
        (Scorer::Pacc, Matching::Raw) => ground_truths.iter().filter(|gt| contains_nonempty(prediction, gt)).count(),
        (Scorer::Acc, Matching::Raw) => {
            ground_truths.iter().filter(|gt| acc_matches(gt, prediction, Matching::Raw)).count()
        }
        (Scorer::Pacc, Matching::Normalized) => {
            let pred_kept = normalize(prediction, NormalizeMode::Substring);
            let pred_bare = normalize(prediction, NormalizeMode::Exact);
            ground_truths
                .iter()
                .filter(|gt| {
                    contains_nonempty(&pred_kept, &normalize(gt, NormalizeMode::Substring))
                        || contains_nonempty(&pred_bare, &normalize(gt, NormalizeMode::Exact))
                })
                .count()
        }
        (Scorer::Acc, Matching::Normalized) => {
            let pred = normalize(prediction, NormalizeMode::Exact);
            ground_truths
                .iter()
                .filter(|gt| {
                    let gt = normalize(gt, NormalizeMode::Exact);
                    !gt.is_empty() && gt == pred
                })
                .count()
        }
    };
    min_one_third(matches)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VqaItem {
    pub question_id: u64,
    pub ground_truths: Vec<String>,
    pub prediction: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItemScore {
    pub question_id: u64,
    pub score: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaccResult {
    pub mean_accuracy: Ratio<u64>,
    pub per_item: Vec<ItemScore>,
}

impl PaccResult {
    pub fn mean_f64(&self) -> f64 {
        to_f64(self.mean_accuracy)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VqaError {
    DuplicateQuestionId(u64),
    EmptyGroundTruths(u64),
}

impl fmt::Display for VqaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VqaError::DuplicateQuestionId(id) => write!(f, "question_id {id} appears more than once"),
            VqaError::EmptyGroundTruths(id) => write!(f, "question_id {id} has no ground truths"),
        }
    }
}

impl core::error::Error for VqaError {}

pub fn evaluate(items: &[VqaItem], scorer: Scorer, matching: Matching) -> Result<PaccResult, VqaError> {
    let mut ids = BTreeSet::new();
    let mut per_item = Vec::with_capacity(items.len());
    // Every score is k/3, so the mean is (Σk) / (3n).
    let mut thirds = 0u64;
    for item in items {
        if !ids.insert(item.question_id) {
            return Err(VqaError::DuplicateQuestionId(item.question_id));
        }
        if item.ground_truths.is_empty() {
            return Err(VqaError::EmptyGroundTruths(item.question_id));
        }
        let score = score_with(scorer, &item.ground_truths, &item.prediction, matching);
        thirds += *score.numer() * (3 / *score.denom());
        per_item.push(ItemScore { question_id: item.question_id, score });
    }
    Ok(PaccResult { mean_accuracy: ratio_or_zero(thirds, 3 * items.len() as u64), per_item })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn gts(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Walking.", NormalizeMode::Exact), "walking");
        assert_eq!(normalize("The  Fish", NormalizeMode::Exact), "fish");
        assert_eq!(normalize("The  Fish", NormalizeMode::Substring), "the fish");
        assert_eq!(normalize("they 'fish' on the boat", NormalizeMode::Substring), "they fish on the boat");
        assert_eq!(normalize(" -- ", NormalizeMode::Substring), "");
    }

    #[test]
    fn fish_on_the_boat() {
        let g = gts(&["fish"]);
        assert_eq!(pacc_score(&g, "they 'fish' on the boat"), Ratio::new(1, 3));
        assert_eq!(acc_score(&g, "they 'fish' on the boat"), Ratio::from_integer(0));
    }

    #[test]
    fn walk_walking() {
        let g = gts(&["walk"]);
        assert_eq!(pacc_score(&g, "walking"), Ratio::new(1, 3));
        assert_eq!(acc_score(&g, "walking"), Ratio::from_integer(0));
    }

    #[test]
    fn three_matches_saturate() {
        let g = gts(&["dog", "dog", "dog", "cat"]);
        assert_eq!(pacc_score(&g, "a dog"), Ratio::from_integer(1));
        assert_eq!(pacc_score(&gts(&["dog", "cat", "cow"]), "dog dog dog"), Ratio::new(1, 3));
        assert_eq!(acc_score(&gts(&["fish"; 5]), "fish"), Ratio::from_integer(1));
        assert_eq!(acc_score(&gts(&["fish", "fish", "cod"]), "Fish."), Ratio::new(2, 3));
    }

    #[test]
    fn article_only_difference_counts_in_both() {
        let g = gts(&["the fish"]);
        assert_eq!(acc_score(&g, "fish"), Ratio::new(1, 3));
        assert_eq!(pacc_score(&g, "fish"), Ratio::new(1, 3));
    }

    #[test]
    fn raw_matching_skips_normalization() {
        let g = gts(&["fish"]);
        assert_eq!(score_with(Scorer::Pacc, &g, "Fish", Matching::Raw), Ratio::from_integer(0));
        assert_eq!(score_with(Scorer::Pacc, &g, "'fish'", Matching::Raw), Ratio::new(1, 3));
        assert_eq!(score_with(Scorer::Acc, &g, "fish", Matching::Raw), Ratio::new(1, 3));
    }

    #[test]
    fn empty_ground_truth_never_matches() {
        assert_eq!(pacc_score(&gts(&["", "..."]), "anything"), Ratio::from_integer(0));
        assert_eq!(acc_score(&gts(&[""]), ""), Ratio::from_integer(0));
    }

    #[test]
    fn evaluate_means() {
        let item =
            |id, p: &str| VqaItem { question_id: id, ground_truths: gts(&["yes", "yes", "yes"]), prediction: p.into() };
        let one = evaluate(&[item(1, "yes")], Scorer::Acc, Matching::Normalized).unwrap();
        assert_eq!(one.mean_accuracy, Ratio::from_integer(1));
        let two = evaluate(&[item(1, "yes"), item(2, "no")], Scorer::Acc, Matching::Normalized).unwrap();
        assert_eq!(two.mean_accuracy, Ratio::new(1, 2));
        assert_eq!(two.mean_f64(), 0.5);
        assert_eq!(
            evaluate(&[item(1, "yes"), item(1, "no")], Scorer::Pacc, Matching::Normalized).unwrap_err(),
            VqaError::DuplicateQuestionId(1)
        );
        let empty = VqaItem { question_id: 4, ground_truths: vec![], prediction: "x".into() };
        assert_eq!(evaluate(&[empty], Scorer::Pacc, Matching::Normalized).unwrap_err(), VqaError::EmptyGroundTruths(4));
    }
}
