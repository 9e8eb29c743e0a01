use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{tokenize, CaptionEvalSet, CaptionMetricError};

pub(crate) fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Pooled `(clipped matches, candidate n-grams)` for n = 1..=4.
pub fn modified_precisions(set: &CaptionEvalSet) -> Result<[(usize, usize); 4], CaptionMetricError> {
    set.check()?;
    let stats = corpus_stats(set, 4);
    Ok(core::array::from_fn(|i| (stats.clipped[i], stats.totals[i])))
}

struct CorpusStats {
    clipped: [usize; 4],
    totals: [usize; 4],
    cand_len: usize,
    ref_len: usize,
}

fn corpus_stats(set: &CaptionEvalSet, max_n: usize) -> CorpusStats {
    let mut st = CorpusStats { clipped: [0; 4], totals: [0; 4], cand_len: 0, ref_len: 0 };
    for item in &set.items {
        let cand = tokenize(&item.candidate);
        let refs: Vec<Vec<String>> = item.references.iter().map(|r| tokenize(r)).collect();
        st.cand_len += cand.len();
        st.ref_len += refs.iter().map(Vec::len).min_by_key(|&len| (len.abs_diff(cand.len()), len)).unwrap_or(0);

        for n in 1..=max_n {
            let mut max_ref: BTreeMap<&[String], usize> = BTreeMap::new();
            for r in &refs {
                for (gram, count) in ngram_counts(r, n) {
                    let slot = max_ref.entry(gram).or_insert(0);
                    *slot = (*slot).max(count);
                }
            }
            for (gram, count) in ngram_counts(&cand, n) {
                st.totals[n - 1] += count;
                st.clipped[n - 1] += count.min(max_ref.get(gram).copied().unwrap_or(0));
            }
        }
    }
    st
}

/// Corpus BLEU-1..=`max_n`.
///
/// Modified precision clips each candidate n-gram count to its largest
/// count in any single reference, and is pooled over the corpus. BLEU-n is
/// the geometric mean of precisions 1..=n times the brevity penalty
/// `exp(1 - r/c)` when `c < r`, where `c` is the total candidate length and
/// `r` the sum of per-item closest reference lengths (ties take the shorter).
/// No smoothing: a zero precision gives a zero score.
pub fn bleu(set: &CaptionEvalSet, max_n: usize) -> Result<Vec<f64>, CaptionMetricError> {
    if !(1..=4).contains(&max_n) {
        return Err(CaptionMetricError::InvalidOrder(max_n));
    }
    set.check()?;

    let CorpusStats { clipped, totals, cand_len, ref_len } = corpus_stats(set, max_n);

    let brevity = if cand_len == 0 {
        0.0
    } else if cand_len < ref_len {
        libm::exp(1.0 - ref_len as f64 / cand_len as f64)
    } else {
        1.0
    };

    let mut scores = Vec::with_capacity(max_n);
    let mut log_sum = 0.0;
    let mut any_zero = false;
    for n in 1..=max_n {
        let (m, t) = (clipped[n - 1], totals[n - 1]);
        if m == 0 || t == 0 {
            any_zero = true;
        } else {
            log_sum += libm::log(m as f64 / t as f64);
        }
        scores.push(if any_zero { 0.0 } else { brevity * libm::exp(log_sum / n as f64) });
    }
    Ok(scores)
}

pub fn bleu_default(set: &CaptionEvalSet) -> Result<[f64; 4], CaptionMetricError> {
    let v = bleu(set, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}
