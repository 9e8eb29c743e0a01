//! Sentence-level object hallucination (CHAIR_s) with recall and
//! hallucination-free recall.
//!
//! For each answer, `mentioned` is the set of lexicon categories found in
//! the text, `hallucinated = mentioned ∩ negatives` and
//! `true_positives = mentioned ∩ positives`.
//!
//! * `chair_s` = answers with any hallucination / answers
//! * `recall` = Σ|true_positives| / Σ|positives|
//! * `recall_wo_h` = Σ|true_positives| over hallucination-free answers / Σ|positives|
//!
//! An answer that hallucinates keeps its denominator share but earns no
//! credit toward `recall_wo_h`, so `recall_wo_h <= recall`. Empty
//! denominators give 0.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::corpus::ObjectAnnotation;
use crate::lexicon::Lexicon;

/// Conventional object-recognition query.
pub const OBJECT_QUERY: &str = "Question: What objects are in the image?";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub image_id: u64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageChair {
    pub image_id: u64,
    pub mentioned: BTreeSet<String>,
    pub hallucinated: BTreeSet<String>,
    pub true_positives: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChairResult {
    pub chair_s: Ratio<u64>,
    pub recall: Ratio<u64>,
    pub recall_wo_h: Ratio<u64>,
    pub n_answers: u64,
    pub per_image: Vec<ImageChair>,
}

impl ChairResult {
    pub fn chair_s_f64(&self) -> f64 {
        to_f64(self.chair_s)
    }
    pub fn recall_f64(&self) -> f64 {
        to_f64(self.recall)
    }
    pub fn recall_wo_h_f64(&self) -> f64 {
        to_f64(self.recall_wo_h)
    }
}

pub(crate) fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub(crate) fn ratio_or_zero(numer: u64, denom: u64) -> Ratio<u64> {
    if denom == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(numer, denom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChairError {
    MissingAnnotation(u64),
    DuplicateAnswer(u64),
}

impl fmt::Display for ChairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChairError::MissingAnnotation(id) => write!(f, "no object annotation for image {id}"),
            ChairError::DuplicateAnswer(id) => write!(f, "more than one answer for image {id}"),
        }
    }
}

impl core::error::Error for ChairError {}

pub fn chair_eval(
    answers: &[AnswerRecord],
    annotations: &[ObjectAnnotation],
    lexicon: &Lexicon,
) -> Result<ChairResult, ChairError> {
    let by_image: BTreeMap<u64, &ObjectAnnotation> = annotations.iter().map(|a| (a.image_id, a)).collect();

    let mut seen = BTreeSet::new();
    let mut per_image = Vec::with_capacity(answers.len());
    let mut hallucinating = 0u64;
    let mut positives_total = 0u64;
    let mut tp_total = 0u64;
    let mut tp_clean_total = 0u64;

    for answer in answers {
        if !seen.insert(answer.image_id) {
            return Err(ChairError::DuplicateAnswer(answer.image_id));
        }
        let annotation = by_image.get(&answer.image_id).ok_or(ChairError::MissingAnnotation(answer.image_id))?;
        let mentioned = lexicon.extract_objects(&answer.text);
        let hallucinated: BTreeSet<String> = mentioned.intersection(&annotation.negative_categories).cloned().collect();
        let true_positives: BTreeSet<String> =
            mentioned.intersection(&annotation.positive_categories).cloned().collect();

        positives_total += annotation.positive_categories.len() as u64;
        tp_total += true_positives.len() as u64;
        if hallucinated.is_empty() {
            tp_clean_total += true_positives.len() as u64;
        } else {
            hallucinating += 1;
        }
        per_image.push(ImageChair { image_id: answer.image_id, mentioned, hallucinated, true_positives });
    }

    let n_answers = answers.len() as u64;
    Ok(ChairResult {
        chair_s: ratio_or_zero(hallucinating, n_answers),
        recall: ratio_or_zero(tp_total, positives_total),
        recall_wo_h: ratio_or_zero(tp_clean_total, positives_total),
        n_answers,
        per_image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn vocab() -> Vec<String> {
        ["person", "dog", "cat", "car", "boat"].iter().map(|s| s.to_string()).collect()
    }

    fn lexicon() -> Lexicon {
        Lexicon::new(vocab(), vec![]).unwrap()
    }

    fn ann(image_id: u64, pos: &[&str]) -> ObjectAnnotation {
        ObjectAnnotation::from_positives(image_id, pos.iter().copied(), &vocab())
    }

    fn answer(image_id: u64, text: &str) -> AnswerRecord {
        AnswerRecord { image_id, text: text.into() }
    }

    #[test]
    fn four_of_ten_hallucinate() {
        let annotations: Vec<_> = (0..10).map(|i| ann(i, &["dog"])).collect();
        let answers: Vec<_> =
            (0..10).map(|i| if i < 4 { answer(i, "a dog and a cat") } else { answer(i, "a dog") }).collect();
        let r = chair_eval(&answers, &annotations, &lexicon()).unwrap();
        assert_eq!(r.chair_s, Ratio::new(4, 10));
        assert_eq!(r.chair_s_f64(), 0.4);
        assert_eq!(r.recall, Ratio::from_integer(1));
        assert_eq!(r.recall_wo_h, Ratio::new(6, 10));
    }

    #[test]
    fn saying_nothing() {
        let r = chair_eval(&[answer(1, "I see things.")], &[ann(1, &["dog"])], &lexicon()).unwrap();
        assert_eq!(r.chair_s, Ratio::from_integer(0));
        assert_eq!(r.recall, Ratio::from_integer(0));
        assert_eq!(r.recall_wo_h, Ratio::from_integer(0));
    }

    #[test]
    fn saying_everything() {
        let r = chair_eval(&[answer(1, "person dog cat car boat")], &[ann(1, &["dog", "person"])], &lexicon()).unwrap();
        assert_eq!(r.chair_s, Ratio::from_integer(1));
        assert_eq!(r.recall, Ratio::from_integer(1));
        assert_eq!(r.recall_wo_h, Ratio::from_integer(0));
        assert_eq!(r.per_image[0].hallucinated.len(), 3);
    }

    #[test]
    fn missing_and_duplicate() {
        assert_eq!(
            chair_eval(&[answer(9, "dog")], &[ann(1, &[])], &lexicon()).unwrap_err(),
            ChairError::MissingAnnotation(9)
        );
        assert_eq!(
            chair_eval(&[answer(1, "dog"), answer(1, "cat")], &[ann(1, &[])], &lexicon()).unwrap_err(),
            ChairError::DuplicateAnswer(1)
        );
    }

    #[test]
    fn empty_input() {
        let r = chair_eval(&[], &[], &lexicon()).unwrap();
        assert_eq!(r.n_answers, 0);
        assert_eq!(r.chair_s, Ratio::from_integer(0));
    }
}
