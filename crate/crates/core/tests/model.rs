mod common;

use matchpyramid_core::embedding::EmbeddingTable;
use matchpyramid_core::gradcheck::check_model;
use matchpyramid_core::layers::{conv2d_forward, max_pool_forward, relu_forward, ConvLayerParams, Padding};
use matchpyramid_core::matching::{matching_matrix, MatchOperator};
use matchpyramid_core::model::*;
use matchpyramid_core::rng::derive;
use matchpyramid_core::Tensor;
use rand::Rng;

use common::{random_pair, text, word_vocab};

/// Worst per-group relative error over ten random pairs of lengths 3..=30.
fn worst_grad_error(op: MatchOperator) -> f64 {
    let vocab = word_vocab(40);
    let config = ModelConfig { operator: op, embedding_dim: 8, ..ModelConfig::default() };
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let mut rng = derive(seed, &[0x6C]);
        let mut params = ModelParams::init(&config, vocab.len(), &mut rng).unwrap();
        // Non-zero biases keep pre-activations off the ReLU kink.
        for b in params.conv1.bias.iter_mut().chain(&mut params.conv2.bias).chain(&mut params.fc1.bias) {
            *b = rng.gen_range(-0.1..0.1);
        }
        let (la, lb) = (rng.gen_range(3..=30), rng.gen_range(3..=30));
        let pair = random_pair(&mut rng, &vocab, la, lb, (seed % 2) as u8);
        for g in check_model(&pair, &params, &config, 1e-6, 60, &mut rng).unwrap() {
            assert!(g.coords_checked > 0);
            worst = worst.max(g.max_rel_error);
            assert!(g.max_rel_error < 1e-4, "{op} seed {seed} {:?}", g);
        }
    }
    worst
}

#[test]
fn full_model_gradients_indicator() {
    worst_grad_error(MatchOperator::Indicator);
}

#[test]
fn full_model_gradients_cosine() {
    worst_grad_error(MatchOperator::Cosine);
}

#[test]
fn full_model_gradients_dot() {
    worst_grad_error(MatchOperator::DotProduct);
}

#[test]
fn indicator_ignores_embeddings() {
    let vocab = word_vocab(10);
    let mut rng = derive(3, &[]);
    let pair = random_pair(&mut rng, &vocab, 7, 9, 1);
    let e1 = EmbeddingTable::init(vocab.len(), 4, &mut rng).unwrap();
    let e2 = EmbeddingTable::init(vocab.len(), 4, &mut rng).unwrap();
    let m0 = matching_matrix(&pair.a, &pair.b, MatchOperator::Indicator, None).unwrap();
    assert_eq!(matching_matrix(&pair.a, &pair.b, MatchOperator::Indicator, Some(&e1)).unwrap(), m0);
    assert_eq!(matching_matrix(&pair.a, &pair.b, MatchOperator::Indicator, Some(&e2)).unwrap(), m0);
}

/// A 3x3 diagonal kernel followed by a 3x3 diagonal kernel responds most to
/// the longest diagonal run of matches: a shared 5-gram beats the same five
/// words matched out of order.
#[test]
fn stacked_diagonal_kernels_prefer_long_ngrams() {
    let vocab = word_vocab(30);
    let diag = |c_in: usize| {
        let mut k = Tensor::zeros(&[1, c_in, 3, 3]);
        for c in 0..c_in {
            for s in 0..3 {
                k.data_mut()[(c * 3 + s) * 3 + s] = 1.0;
            }
        }
        ConvLayerParams::from_parts(k, vec![-1.0]).unwrap()
    };
    let response = |a: &[&str], b: &[&str]| {
        let m = matching_matrix(&text(a, &vocab), &text(b, &vocab), MatchOperator::Indicator, None).unwrap();
        let h1 = relu_forward(&conv2d_forward(&m, &diag(1), Padding::Same).unwrap());
        let (p1, _) = max_pool_forward(&h1, &dynamic_pool_geometry(10, 10, 5, 5).unwrap()).unwrap();
        let h2 = relu_forward(&conv2d_forward(&p1, &diag(1), Padding::Same).unwrap());
        h2.max().unwrap()
    };
    let a = ["w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8", "w9"];
    let ngram = ["w20", "w21", "w2", "w3", "w4", "w5", "w6", "w22", "w23", "w24"];
    let shuffled = ["w20", "w6", "w21", "w4", "w22", "w2", "w23", "w5", "w3", "w24"];
    assert!(response(&a, &ngram) > response(&a, &shuffled));
    assert_eq!(response(&a, &shuffled), 0.0);
}

#[test]
fn forward_shapes_follow_config() {
    let vocab = word_vocab(20);
    let config = ModelConfig::default();
    let mut rng = derive(1, &[]);
    let params = ModelParams::init(&config, vocab.len(), &mut rng).unwrap();
    for (la, lb) in [(1, 1), (3, 40), (32, 32), (7, 2)] {
        let pair = random_pair(&mut rng, &vocab, la, lb, 0);
        let (_, cache) = forward(&pair, &params, &config, Mode::Eval, &mut rng).unwrap();
        assert_eq!(cache.matrix.shape(), &[1, la, lb]);
        assert_eq!(cache.pool1.shape(), &[8, 10, 10]);
        assert_eq!(cache.flat.len(), 400);
    }
}

#[test]
fn mismatched_checkpoint_shapes_are_named() {
    let config = ModelConfig::default();
    let params = ModelParams::zeros(&config, 10).unwrap();
    let other = ModelConfig { conv1_maps: 4, ..ModelConfig::default() };
    let msg = params.check_config(&other).unwrap_err().to_string();
    assert!(msg.contains("conv1.kernels"), "{msg}");
}

#[test]
fn pyramid_on_twelve_by_fourteen_matrix() {
    let vocab = word_vocab(30);
    let config = ModelConfig { operator: MatchOperator::DotProduct, embedding_dim: 6, ..ModelConfig::default() };
    let mut rng = derive(12, &[14]);
    let mut params = ModelParams::init(&config, vocab.len(), &mut rng).unwrap();
    for b in params.conv1.bias.iter_mut().chain(&mut params.conv2.bias).chain(&mut params.fc1.bias) {
        *b = rng.gen_range(-0.1..0.1);
    }
    let pair = random_pair(&mut rng, &vocab, 12, 14, 0);
    for g in check_model(&pair, &params, &config, 1e-6, 80, &mut rng).unwrap() {
        assert!(g.max_rel_error < 1e-4, "{g:?}");
    }
}

#[test]
fn swapped_pair_keeps_shape() {
    let vocab = word_vocab(20);
    let config = ModelConfig::default();
    let mut rng = derive(5, &[]);
    let params = ModelParams::init(&config, vocab.len(), &mut rng).unwrap();
    let p = random_pair(&mut rng, &vocab, 6, 11, 0);
    let (s1, c1) = forward_texts(&p.a, &p.b, &params, &config, Mode::Eval, &mut rng).unwrap();
    let (s2, c2) = forward_texts(&p.b, &p.a, &params, &config, Mode::Eval, &mut rng).unwrap();
    assert_eq!(c1.matrix.shape(), &[1, 6, 11]);
    assert_eq!(c2.matrix.shape(), &[1, 11, 6]);
    assert_eq!(c1.flat.len(), c2.flat.len());
    assert!(s1.iter().chain(&s2).all(|s| s.is_finite()));
}

#[test]
fn absent_tokens_get_no_embedding_gradient() {
    let vocab = word_vocab(20);
    let config = ModelConfig { operator: MatchOperator::DotProduct, embedding_dim: 5, ..ModelConfig::default() };
    let mut rng = derive(8, &[]);
    let params = ModelParams::init(&config, vocab.len(), &mut rng).unwrap();
    let pair = random_pair(&mut rng, &vocab, 5, 4, 1);
    let (_, cache) = forward(&pair, &params, &config, Mode::Train, &mut rng).unwrap();
    let (_, grads) = backward(&cache, 1, &params, &config).unwrap();
    let present: Vec<usize> = pair.a.ids.iter().chain(&pair.b.ids).copied().collect();
    assert!(grads.embeddings.keys().all(|id| present.contains(id)));
    for id in (0..vocab.len()).filter(|id| !present.contains(id)) {
        for d in 0..5 {
            assert_eq!(grads.coordinate(ParamGroup::Embeddings, id * 5 + d, 5), 0.0);
        }
    }
}

#[test]
fn injected_zero_score_gradient_gives_zero_gradients() {
    let vocab = word_vocab(10);
    let config = ModelConfig { operator: MatchOperator::Cosine, embedding_dim: 4, ..ModelConfig::default() };
    let mut rng = derive(9, &[]);
    let params = ModelParams::init(&config, vocab.len(), &mut rng).unwrap();
    let pair = random_pair(&mut rng, &vocab, 5, 6, 1);
    let (_, cache) = forward(&pair, &params, &config, Mode::Train, &mut rng).unwrap();
    let g = backward_from_scores(&cache, [0.0, 0.0], &params, &config).unwrap();
    for group in ParamGroup::ALL {
        if let Some(v) = g.group(group) {
            assert!(v.iter().all(|&x| x == 0.0), "{}", group.name());
        }
    }
    assert!(g.embeddings.values().flatten().all(|&x| x == 0.0));
}

#[test]
fn tied_scores_predict_positive() {
    let vocab = word_vocab(10);
    let config = ModelConfig::default();
    // Zero weights: both scores equal the (zero) output bias.
    let params = ModelParams::zeros(&config, vocab.len()).unwrap();
    let mut rng = derive(2, &[]);
    let p = random_pair(&mut rng, &vocab, 4, 4, 0);
    let pred = predict(&p, &params, &config).unwrap();
    assert_eq!(pred.class, 1);
    assert_eq!(pred.p1, 0.5);
}

#[test]
fn probabilities_are_complementary() {
    let vocab = word_vocab(10);
    let config = ModelConfig::default();
    let mut rng = derive(4, &[]);
    let params = ModelParams::init(&config, vocab.len(), &mut rng).unwrap();
    for _ in 0..20 {
        let (la, lb) = (rng.gen_range(1..15), rng.gen_range(1..15));
        let p = random_pair(&mut rng, &vocab, la, lb, 0);
        let pred = predict(&p, &params, &config).unwrap();
        assert!((0.0..=1.0).contains(&pred.p1));
        assert_eq!(pred.class, u8::from(pred.p1 >= 0.5));
    }
}
