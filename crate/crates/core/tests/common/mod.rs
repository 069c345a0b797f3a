#![allow(dead_code)]

use matchpyramid_core::data::{Text, TextPair};
use matchpyramid_core::vocab::Vocabulary;
use matchpyramid_core::Tensor;
use rand::Rng;

pub fn rand_tensor<R: Rng>(rng: &mut R, shape: &[usize]) -> Tensor {
    let n = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn word_vocab(n: usize) -> Vocabulary {
    let mut tokens = vec!["<pad>".to_string(), "<unk>".to_string()];
    tokens.extend((0..n).map(|i| format!("w{i}")));
    Vocabulary::from_tokens(tokens).unwrap()
}

pub fn text(words: &[&str], vocab: &Vocabulary) -> Text {
    Text::new(words.iter().map(|w| w.to_string()).collect(), vocab)
}

/// Random pair over the `w*` words of `vocab`.
pub fn random_pair<R: Rng>(rng: &mut R, vocab: &Vocabulary, len_a: usize, len_b: usize, label: u8) -> TextPair {
    let words = vocab.len() - 2;
    let mut side = |len: usize| {
        let toks = (0..len).map(|_| format!("w{}", rng.gen_range(0..words))).collect();
        Text::new(toks, vocab)
    };
    TextPair { a: side(len_a), b: side(len_b), label }
}
