use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::bleu::ngram_counts;
use super::{porter_stem, tokenize, CaptionEvalSet, CaptionMetricError};

const MAX_N: usize = 4;
const SCALE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CiderVariant {
    /// TF-IDF cosine averaged over references and n = 1..=4, times 10.
    #[default]
    Plain,
    /// CIDEr-D: candidate counts clipped to the reference's, and a Gaussian
    /// penalty on the length difference.
    D { sigma: f64 },
}

impl CiderVariant {
    pub const D_DEFAULT: CiderVariant = CiderVariant::D { sigma: 6.0 };
}

type Grams = BTreeMap<Vec<String>, f64>;

struct Doc {
    /// Raw n-gram counts for n = 1..=4.
    counts: [Grams; MAX_N],
    len: usize,
}

fn doc(text: &str) -> Doc {
    let tokens: Vec<String> = tokenize(text).iter().map(|t| porter_stem(t)).collect();
    let counts = core::array::from_fn(|i| {
        ngram_counts(&tokens, i + 1).into_iter().map(|(g, c)| (g.to_vec(), c as f64)).collect()
    });
    Doc { counts, len: tokens.len() }
}

struct Weighted {
    vecs: [Grams; MAX_N],
    norms: [f64; MAX_N],
    len: usize,
}

fn weigh(d: &Doc, idf: &dyn Fn(&[String]) -> f64) -> Weighted {
    let mut norms = [0.0; MAX_N];
    let vecs = core::array::from_fn(|n| {
        let total: f64 = d.counts[n].values().sum();
        let v: Grams = d.counts[n].iter().map(|(g, &c)| (g.clone(), c / total * idf(g))).collect();
        norms[n] = libm::sqrt(v.values().map(|x| x * x).sum());
        v
    });
    Weighted { vecs, norms, len: d.len }
}

/// Corpus CIDEr, the mean of per-item scores.
///
/// Document frequency of an n-gram is the number of items whose reference
/// set contains it; IDF is `ln(N / max(1, df))` over the N items. Term
/// weights are `tf * idf` with tf the n-gram count over the sentence's
/// total count of that order. Each item scores
/// `10 * mean_n mean_refs cos(candidate_n, reference_n)`; a zero-norm
/// vector contributes a cosine of 0.
pub fn cider(set: &CaptionEvalSet, variant: CiderVariant) -> Result<f64, CaptionMetricError> {
    set.check()?;
    if set.items.len() < 2 {
        return Err(CaptionMetricError::SingletonCorpus);
    }

    let cands: Vec<Doc> = set.items.iter().map(|i| doc(&i.candidate)).collect();
    let refs: Vec<Vec<Doc>> = set.items.iter().map(|i| i.references.iter().map(|r| doc(r)).collect()).collect();

    let mut df: BTreeMap<&[String], f64> = BTreeMap::new();
    for item_refs in &refs {
        let mut present: BTreeMap<&[String], ()> = BTreeMap::new();
        for r in item_refs {
            for n in 0..MAX_N {
                for g in r.counts[n].keys() {
                    present.insert(g.as_slice(), ());
                }
            }
        }
        for g in present.into_keys() {
            *df.entry(g).or_insert(0.0) += 1.0;
        }
    }
    let log_n = libm::log(set.items.len() as f64);
    let idf = |g: &[String]| log_n - libm::log(df.get(g).copied().unwrap_or(0.0).max(1.0));

    let mut total = 0.0;
    for (cand, item_refs) in cands.iter().zip(&refs) {
        let c = weigh(cand, &idf);
        let mut item = 0.0;
        for r in item_refs {
            let r = weigh(r, &idf);
            item += pair_score(&c, &r, variant);
        }
        total += SCALE * item / item_refs.len() as f64;
    }
    Ok(total / set.items.len() as f64)
}

fn pair_score(c: &Weighted, r: &Weighted, variant: CiderVariant) -> f64 {
    let mut sum = 0.0;
    for n in 0..MAX_N {
        let denom = c.norms[n] * r.norms[n];
        if denom == 0.0 {
            continue;
        }
        let dot: f64 = c.vecs[n]
            .iter()
            .filter_map(|(g, &cv)| {
                r.vecs[n].get(g).map(|&rv| match variant {
                    CiderVariant::Plain => cv * rv,
                    CiderVariant::D { .. } => cv.min(rv) * rv,
                })
            })
            .sum();
        sum += dot / denom;
    }
    let mut score = sum / MAX_N as f64;
    if let CiderVariant::D { sigma } = variant {
        let delta = c.len as f64 - r.len as f64;
        score *= libm::exp(-(delta * delta) / (2.0 * sigma * sigma));
    }
    score
}
