//! Non-neural baselines: predict-all-positive and Tf-Idf inner product with
//! a fitted decision threshold.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::ln;
use crate::{Error, Result};

pub fn all_positive_predict(n: usize) -> Vec<u8> {
    vec![1; n]
}

/// Document frequencies and smoothed idf weights,
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`, raw counts as tf.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    n_docs: usize,
    df: BTreeMap<String, usize>,
    idf: BTreeMap<String, f64>,
}

fn counts<S: AsRef<str>>(doc: &[S]) -> BTreeMap<&str, f64> {
    let mut c = BTreeMap::new();
    for t in doc {
        *c.entry(t.as_ref()).or_insert(0.0) += 1.0;
    }
    c
}

impl TfIdfModel {
    /// Each item is one document (one side of a pair).
    pub fn fit<'a, I, S>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut n_docs = 0;
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in docs {
            n_docs += 1;
            for term in counts(doc).into_keys() {
                match df.get_mut(term) {
                    Some(n) => *n += 1,
                    None => {
                        df.insert(String::from(term), 1);
                    }
                }
            }
        }
        if n_docs == 0 {
            return Err(Error::Input("tf-idf needs a non-empty corpus".into()));
        }
        let idf = df.iter().map(|(t, &d)| (t.clone(), Self::smoothed_idf(n_docs, d))).collect();
        Ok(TfIdfModel { n_docs, df, idf })
    }

    fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
        ln((1 + n_docs) as f64 / (1 + df) as f64) + 1.0
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn df(&self, term: &str) -> usize {
        self.df.get(term).copied().unwrap_or(0)
    }

    /// Weight of `term`; unseen terms get `ln(1 + N) + 1`.
    pub fn idf(&self, term: &str) -> f64 {
        self.idf.get(term).copied().unwrap_or_else(|| Self::smoothed_idf(self.n_docs, 0))
    }

    pub fn vocab_size(&self) -> usize {
        self.df.len()
    }

    /// Inner product of the two tf-idf vectors over the fitted vocabulary.
    pub fn score<S: AsRef<str>>(&self, a: &[S], b: &[S]) -> f64 {
        let ca = counts(a);
        let cb = counts(b);
        let mut s = 0.0;
        for (term, ta) in &ca {
            if let (Some(tb), Some(w)) = (cb.get(term), self.idf.get(*term)) {
                s += ta * w * tb * w;
            }
        }
        s
    }
}

/// Threshold maximizing accuracy of `score > threshold => positive`.
///
/// Candidates are the midpoints between adjacent distinct sorted scores plus
/// one point below the minimum and one above the maximum. Among equally
/// accurate candidates the lowest wins.
pub fn select_threshold(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::dim("select_threshold", alloc::format!("{} scores, {} labels", scores.len(), labels.len())));
    }
    let pos = labels.iter().filter(|&&y| y != 0).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::Input("threshold selection needs both positive and negative examples".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Input("threshold selection needs finite scores".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));
    let lo = scores[order[0]];
    let hi = scores[order[order.len() - 1]];
    // Threshold below everything: all predicted positive.
    let mut best_correct = pos;
    let mut best = lo - lo.abs().max(1.0);
    let mut correct = pos;
    for k in 0..order.len() {
        // Move order[k] to the negative side.
        correct = if labels[order[k]] != 0 { correct - 1 } else { correct + 1 };
        let next = order.get(k + 1).map(|&i| scores[i]);
        let cut = match next {
            Some(v) if v == scores[order[k]] => continue,
            Some(v) => {
                let a = scores[order[k]];
                let mid = a + (v - a) / 2.0;
                // Adjacent floats: the midpoint may round up onto `v`.
                if mid < v { mid } else { a }
            }
            None => hi + hi.abs().max(1.0),
        };
        if correct > best_correct {
            best_correct = correct;
            best = cut;
        }
    }
    Ok(best)
}

pub fn classify(scores: &[f64], threshold: f64) -> Vec<u8> {
    scores.iter().map(|&s| u8::from(s > threshold)).collect()
}
