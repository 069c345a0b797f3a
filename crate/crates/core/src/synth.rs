//! Synthetic citation-style pair corpus.
//!
//! Each text is an "abstract" drawn from one topic: a mix of topic words
//! (`tNNwMMM`, private to a topic) and shared filler words (`fNN`, Zipf
//! distributed, common to every topic). A positive pair is two abstracts of
//! the same topic, with a short span of the first copied into the second.
//! A negative pair is two abstracts of different, randomly chosen topics.
//! Only the corpus shape is modelled (1:k positive:negative ratio,
//! abstract-like lengths); the content is artificial.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::RawPair;
use crate::rng::{derive, stream, ChaCha8Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub n_pos: usize,
    /// Negatives per positive.
    pub neg_ratio: usize,
    /// Total number of topic words, split evenly over the topics.
    pub topic_words: usize,
    pub num_topics: usize,
    pub filler_words: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability that a token is a topic word rather than filler.
    pub topic_fraction: f64,
    /// Length range of the span copied from `text_a` into `text_b` of positives.
    pub shared_span: (usize, usize),
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            n_pos: 2000,
            neg_ratio: 2,
            topic_words: 400,
            num_topics: 8,
            filler_words: 40,
            min_len: 20,
            max_len: 40,
            topic_fraction: 0.3,
            shared_span: (0, 2),
            seed: 0,
        }
    }
}

impl CorpusSpec {
    fn words_per_topic(&self) -> usize {
        (self.topic_words / self.num_topics.max(1)).max(1)
    }

    pub fn topic_tokens(&self) -> Vec<String> {
        (0..self.num_topics).flat_map(|t| (0..self.words_per_topic()).map(move |w| topic_token(t, w))).collect()
    }

    pub fn filler_tokens(&self) -> Vec<String> {
        (0..self.filler_words).map(filler_token).collect()
    }
}

pub fn topic_token(topic: usize, word: usize) -> String {
    format!("t{topic:02}w{word:03}")
}

pub fn filler_token(i: usize) -> String {
    format!("f{i:02}")
}

pub fn is_topic_token(tok: &str) -> bool {
    tok.starts_with('t') && tok.contains('w')
}

pub fn is_filler_token(tok: &str) -> bool {
    tok.len() > 1 && tok.starts_with('f') && tok[1..].bytes().all(|b| b.is_ascii_digit())
}

/// `n_pos` positives and `neg_ratio * n_pos` negatives over `vocab_size`
/// topic words, in seeded random order.
pub fn generate_citation_corpus(n_pos: usize, neg_ratio: usize, vocab_size: usize, seed: u64) -> Vec<RawPair> {
    generate(&CorpusSpec { n_pos, neg_ratio, topic_words: vocab_size, seed, ..CorpusSpec::default() })
}

struct Sampler {
    filler: WeightedIndex<f64>,
    words_per_topic: usize,
}

impl Sampler {
    fn text(&self, spec: &CorpusSpec, topic: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
        let len = rng.gen_range(spec.min_len..=spec.max_len.max(spec.min_len));
        (0..len)
            .map(|_| {
                if rng.gen::<f64>() < spec.topic_fraction {
                    topic_token(topic, rng.gen_range(0..self.words_per_topic))
                } else {
                    filler_token(self.filler.sample(rng))
                }
            })
            .collect()
    }
}

pub fn generate(spec: &CorpusSpec) -> Vec<RawPair> {
    assert!(spec.num_topics >= 2 && spec.filler_words >= 1 && spec.min_len >= 1, "degenerate corpus spec");
    let mut rng = derive(spec.seed, &[stream::CORPUS]);
    let sampler = Sampler {
        filler: WeightedIndex::new((0..spec.filler_words).map(|r| 1.0 / (r + 1) as f64)).expect("positive weights"),
        words_per_topic: spec.words_per_topic(),
    };
    let n_neg = spec.n_pos * spec.neg_ratio;
    let mut pairs = Vec::with_capacity(spec.n_pos + n_neg);
    for _ in 0..spec.n_pos {
        let topic = rng.gen_range(0..spec.num_topics);
        let a = sampler.text(spec, topic, &mut rng);
        let mut b = sampler.text(spec, topic, &mut rng);
        let span = rng.gen_range(spec.shared_span.0..=spec.shared_span.1).min(a.len()).min(b.len());
        if span > 0 {
            let from = rng.gen_range(0..=a.len() - span);
            let to = rng.gen_range(0..=b.len() - span);
            b[to..to + span].clone_from_slice(&a[from..from + span]);
        }
        pairs.push(RawPair { text_a: a.join(" "), text_b: b.join(" "), label: 1 });
    }
    for _ in 0..n_neg {
        let ta = rng.gen_range(0..spec.num_topics);
        let tb = (ta + rng.gen_range(1..spec.num_topics)) % spec.num_topics;
        let a = sampler.text(spec, ta, &mut rng);
        let b = sampler.text(spec, tb, &mut rng);
        pairs.push(RawPair { text_a: a.join(" "), text_b: b.join(" "), label: 0 });
    }
    pairs.shuffle(&mut rng);
    pairs
}

/// Small linearly separable set for sanity runs: a positive pair is a text
/// and an exact copy of it; a negative pair shares no word. Alternating labels.
pub fn separable_pairs(n: usize, seed: u64) -> Vec<RawPair> {
    let mut rng = derive(seed, &[stream::CORPUS, 1]);
    let mut words: Vec<String> = (0..60).map(|i| format!("s{i:02}")).collect();
    (0..n)
        .map(|i| {
            words.shuffle(&mut rng);
            let la = rng.gen_range(4..=10);
            let a = words[..la].join(" ");
            let label = u8::from(i % 2 == 0);
            let b = if label == 1 {
                a.clone()
            } else {
                let lb = rng.gen_range(4..=10);
                words[la..la + lb].join(" ")
            };
            RawPair { text_a: a, text_b: b, label }
        })
        .collect()
}
