mod common;

use matchpyramid_core::checkpoint;
use matchpyramid_core::data::{tokenize, PairDataset, Provenance, RawPair, TextPair};
use matchpyramid_core::embedding::ranked_norms;
use matchpyramid_core::matching::{matching_matrix, MatchOperator};
use matchpyramid_core::model::{predict, ModelConfig, ModelParams};
use matchpyramid_core::rng::{derive, stream};
use matchpyramid_core::synth::{generate_citation_corpus, separable_pairs};
use matchpyramid_core::train::{evaluate, train, train_from, TrainConfig};
use matchpyramid_core::vocab::Vocabulary;
use rand::Rng;

use common::{random_pair, word_vocab};

fn encode(raw: &[RawPair]) -> (Vocabulary, Vec<TextPair>) {
    let toks: Vec<Vec<String>> = raw.iter().flat_map(|p| [tokenize(&p.text_a), tokenize(&p.text_b)]).collect();
    let vocab = Vocabulary::build(toks.iter().map(|t| t.as_slice()), 1).unwrap();
    let ds = PairDataset::encode(raw, &vocab, None, Provenance::Custom).unwrap();
    (vocab, ds.pairs)
}

#[test]
fn overfits_twenty_separable_pairs() {
    let (vocab, pairs) = encode(&separable_pairs(20, 0));
    let config = ModelConfig::default();
    let tc = TrainConfig { max_epochs: 500, patience: 500, ..TrainConfig::default() };
    let out = train(&pairs, &pairs, &config, &tc, vocab.len()).unwrap();
    let acc = evaluate(&pairs, &out.params, &config, 1).unwrap().accuracy;
    assert_eq!(acc, 100.0, "after {} epochs", out.history.records.len());
    assert!(out.history.records.len() <= 500);
}

#[test]
fn zero_learning_rate_changes_nothing() {
    let (vocab, pairs) = encode(&separable_pairs(12, 3));
    let config = ModelConfig { operator: MatchOperator::DotProduct, embedding_dim: 6, dropout_rate: 0.0, ..Default::default() };
    let init = ModelParams::init(&config, vocab.len(), &mut derive(1, &[stream::INIT])).unwrap();
    let tc = TrainConfig { learning_rate: 0.0, max_epochs: 4, patience: 10, batch_size: 5, ..Default::default() };
    let out = train_from(init.clone(), &pairs, &pairs[..4], &config, &tc, &mut |_| {}).unwrap();
    assert_eq!(out.params, init);
    let losses: Vec<f64> = out.history.records.iter().map(|r| r.train_loss).collect();
    assert_eq!(losses.len(), 4);
    assert!(losses.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12), "{losses:?}");
}

#[test]
fn worker_count_does_not_change_result() {
    let raw = generate_citation_corpus(40, 2, 60, 7);
    let (vocab, pairs) = encode(&raw);
    let config = ModelConfig { operator: MatchOperator::DotProduct, embedding_dim: 8, ..Default::default() };
    let run = |workers| {
        let tc = TrainConfig { max_epochs: 2, batch_size: 16, seed: 11, workers, ..Default::default() };
        let out = train(&pairs[..100], &pairs[100..], &config, &tc, vocab.len()).unwrap();
        checkpoint::encode(&out.params, &config, &vocab)
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn epoch_loss_falls_early_on() {
    let raw = generate_citation_corpus(80, 2, 80, 2);
    let (vocab, pairs) = encode(&raw);
    let config = ModelConfig { operator: MatchOperator::DotProduct, embedding_dim: 16, ..Default::default() };
    let tc = TrainConfig { max_epochs: 5, patience: 10, batch_size: 16, seed: 1, ..Default::default() };
    let out = train(&pairs[..200], &pairs[200..], &config, &tc, vocab.len()).unwrap();
    let losses: Vec<f64> = out.history.records.iter().map(|r| r.train_loss).collect();
    assert!(losses.windows(2).all(|w| w[1] < w[0]), "{losses:?}");
}

#[test]
fn predictive_token_gets_a_top_decile_norm() {
    let vocab_words = word_vocab(40);
    let mut rng = derive(21, &[]);
    let raw: Vec<RawPair> = (0..240)
        .map(|i| {
            let label = u8::from(i % 2 == 0);
            let (la, lb) = (rng.gen_range(5..9), rng.gen_range(5..9));
            let p = random_pair(&mut rng, &vocab_words, la, lb, label);
            let mut a = p.a.tokens.clone();
            let mut b = p.b.tokens.clone();
            if label == 1 {
                a.insert(rng.gen_range(0..a.len()), "key".into());
                b.insert(rng.gen_range(0..b.len()), "key".into());
            }
            RawPair { text_a: a.join(" "), text_b: b.join(" "), label }
        })
        .collect();
    let (vocab, pairs) = encode(&raw);
    let config = ModelConfig { operator: MatchOperator::DotProduct, embedding_dim: 10, ..Default::default() };
    let tc = TrainConfig { max_epochs: 8, patience: 8, batch_size: 16, seed: 5, ..Default::default() };
    let out = train(&pairs[..200], &pairs[200..], &config, &tc, vocab.len()).unwrap();
    let ranked = ranked_norms(out.params.embeddings.as_ref().unwrap(), &vocab);
    let rank = ranked.iter().position(|(t, _)| t == "key").unwrap();
    assert!(rank < ranked.len().div_ceil(10), "rank {rank} of {}: {:?}", ranked.len(), &ranked[..5]);
}

#[test]
fn checkpoint_round_trip_predicts_identically() {
    let vocab = word_vocab(30);
    let config = ModelConfig { operator: MatchOperator::Cosine, embedding_dim: 7, ..Default::default() };
    let mut rng = derive(17, &[]);
    let params = ModelParams::init(&config, vocab.len(), &mut rng).unwrap();
    let bytes = checkpoint::encode(&params, &config, &vocab);
    let loaded = checkpoint::decode(&bytes).unwrap();
    assert_eq!(loaded.config, config);
    for _ in 0..100 {
        let (la, lb) = (rng.gen_range(1..=32), rng.gen_range(1..=32));
        let p = random_pair(&mut rng, &vocab, la, lb, 0);
        let want = predict(&p, &params, &config).unwrap();
        let got = predict(&p, &loaded.params, &loaded.config).unwrap();
        assert_eq!(want.p1.to_bits(), got.p1.to_bits());
        assert_eq!(want.class, got.class);
    }
}

#[test]
fn positives_have_denser_indicator_matrices() {
    let raw = generate_citation_corpus(300, 2, 400, 0);
    let (_, pairs) = encode(&raw);
    let (mut sum, mut count) = ([0.0; 2], [0usize; 2]);
    for p in &pairs {
        let m = matching_matrix(&p.a, &p.b, MatchOperator::Indicator, None).unwrap();
        sum[p.label as usize] += m.sum() / m.len() as f64;
        count[p.label as usize] += 1;
    }
    let (neg, pos) = (sum[0] / count[0] as f64, sum[1] / count[1] as f64);
    assert!(pos > neg, "positive density {pos} vs negative {neg}");
}
