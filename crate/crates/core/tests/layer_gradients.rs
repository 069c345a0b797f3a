//! Finite-difference checks for each layer in isolation, over 20 seeds.
//! Every layer is probed through the scalar objective `<g, layer(x)>` with a
//! random upstream gradient `g`.

mod common;

use matchpyramid_core::embedding::EmbeddingTable;
use matchpyramid_core::gradcheck::grad_check;
use matchpyramid_core::layers::*;
use matchpyramid_core::matching::{matching_matrix, matching_matrix_backward, MatchOperator};
use matchpyramid_core::rng::derive;
use matchpyramid_core::Tensor;
use rand::Rng;

use common::{rand_tensor, random_pair, word_vocab};

const EPS: f64 = 1e-6;
// Rounding in the objective sum, divided by 2*EPS, dominates for small gradients.
const TOL: f64 = 1e-5;
const SEEDS: u64 = 20;

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

#[test]
fn conv_input_kernels_and_bias() {
    for seed in 0..SEEDS {
        let mut rng = derive(seed, &[1]);
        let (c_in, c_out) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let (h, w, r) = (rng.gen_range(2..=7), rng.gen_range(2..=7), rng.gen_range(1..=3));
        let x = rand_tensor(&mut rng, &[c_in, h, w]);
        let k = rand_tensor(&mut rng, &[c_out, c_in, r, r]);
        let b: Vec<f64> = (0..c_out).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = ConvLayerParams::from_parts(k.clone(), b.clone()).unwrap();
        let g = rand_tensor(&mut rng, &[c_out, h, w]);
        let (gx, gp) = conv2d_backward(&x, &p, Padding::Same, &g).unwrap();

        let f_x = |v: &[f64]| {
            let xi = Tensor::from_vec(x.shape(), v.to_vec()).unwrap();
            inner(conv2d_forward(&xi, &p, Padding::Same).unwrap().data(), g.data())
        };
        assert!(grad_check(f_x, x.data(), gx.data(), &all(x.len()), EPS) < TOL, "seed {seed} input");
        let f_k = |v: &[f64]| {
            let pk = ConvLayerParams::from_parts(Tensor::from_vec(k.shape(), v.to_vec()).unwrap(), b.clone()).unwrap();
            inner(conv2d_forward(&x, &pk, Padding::Same).unwrap().data(), g.data())
        };
        assert!(grad_check(f_k, k.data(), gp.kernels.data(), &all(k.len()), EPS) < TOL, "seed {seed} kernels");
        let f_b = |v: &[f64]| {
            let pb = ConvLayerParams::from_parts(k.clone(), v.to_vec()).unwrap();
            inner(conv2d_forward(&x, &pb, Padding::Same).unwrap().data(), g.data())
        };
        assert!(grad_check(f_b, &b, &gp.bias, &all(b.len()), EPS) < TOL, "seed {seed} bias");
    }
}

#[test]
fn max_pool_dynamic_and_fixed() {
    for seed in 0..SEEDS {
        let mut rng = derive(seed, &[2]);
        let (c, h, w) = (rng.gen_range(1..=3), rng.gen_range(1..=25), rng.gen_range(1..=25));
        // Distinct values keep every argmax strictly separated from the runner-up.
        let x = rand_tensor(&mut rng, &[c, h, w]);
        let geoms = [
            PoolGeometry::dynamic(h, w, 10, 10).unwrap(),
            PoolGeometry::fixed(rng.gen_range(1..=h.min(3)), rng.gen_range(1..=w.min(3))),
        ];
        for geom in geoms {
            let (out, idx) = max_pool_forward(&x, &geom).unwrap();
            let g = rand_tensor(&mut rng, out.shape());
            let gx = max_pool_backward(&idx, &g).unwrap();
            let f = |v: &[f64]| {
                let xi = Tensor::from_vec(x.shape(), v.to_vec()).unwrap();
                inner(max_pool_forward(&xi, &geom).unwrap().0.data(), g.data())
            };
            let err = grad_check(f, x.data(), gx.data(), &all(x.len()), EPS);
            assert!(err < TOL, "seed {seed} {geom:?} shape {:?}: {err}", x.shape());
        }
    }
}

#[test]
fn relu_away_from_the_kink() {
    for seed in 0..SEEDS {
        let mut rng = derive(seed, &[3]);
        let mut x = rand_tensor(&mut rng, &[2, 4, 5]);
        for v in x.data_mut() {
            if v.abs() < 1e-3 {
                *v = 0.5;
            }
        }
        let g = rand_tensor(&mut rng, x.shape());
        let gx = relu_backward(&x, &g).unwrap();
        let f = |v: &[f64]| {
            let xi = Tensor::from_vec(x.shape(), v.to_vec()).unwrap();
            inner(relu_forward(&xi).data(), g.data())
        };
        assert!(grad_check(f, x.data(), gx.data(), &all(x.len()), EPS) < TOL, "seed {seed}");
    }
}

#[test]
fn linear_input_weight_and_bias() {
    for seed in 0..SEEDS {
        let mut rng = derive(seed, &[4]);
        let (n_in, n_out) = (rng.gen_range(1..=12), rng.gen_range(1..=6));
        let z: Vec<f64> = (0..n_in).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let wt = rand_tensor(&mut rng, &[n_out, n_in]);
        let b: Vec<f64> = (0..n_out).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = LinearLayerParams::from_parts(wt.clone(), b.clone()).unwrap();
        let g: Vec<f64> = (0..n_out).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (gz, gp) = linear_backward(&z, &p, &g).unwrap();
        let f_z = |v: &[f64]| inner(&linear_forward(v, &p).unwrap(), &g);
        assert!(grad_check(f_z, &z, &gz, &all(n_in), EPS) < TOL, "seed {seed} input");
        let f_w = |v: &[f64]| {
            let pw = LinearLayerParams::from_parts(Tensor::from_vec(wt.shape(), v.to_vec()).unwrap(), b.clone()).unwrap();
            inner(&linear_forward(&z, &pw).unwrap(), &g)
        };
        assert!(grad_check(f_w, wt.data(), gp.weight.data(), &all(wt.len()), EPS) < TOL, "seed {seed} weight");
        let f_b = |v: &[f64]| {
            let pb = LinearLayerParams::from_parts(wt.clone(), v.to_vec()).unwrap();
            inner(&linear_forward(&z, &pb).unwrap(), &g)
        };
        assert!(grad_check(f_b, &b, &gp.bias, &all(n_out), EPS) < TOL, "seed {seed} bias");
    }
}

#[test]
fn dropout_with_frozen_mask() {
    for seed in 0..SEEDS {
        let mut rng = derive(seed, &[5]);
        let x: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, mask) = dropout(&x, 0.5, true, &mut derive(seed, &[55])).unwrap();
        let g: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gx = dropout_backward(&mask, &g).unwrap();
        // Re-drawing from the same generator reproduces the mask.
        let f = |v: &[f64]| inner(&dropout(v, 0.5, true, &mut derive(seed, &[55])).unwrap().0, &g);
        assert!(grad_check(f, &x, &gx, &all(16), EPS) < TOL, "seed {seed}");
    }
}

#[test]
fn softmax_cross_entropy_scores() {
    for seed in 0..SEEDS {
        let mut rng = derive(seed, &[6]);
        let s = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let label = (seed % 2) as u8;
        let out = softmax_cross_entropy(s, label);
        let f = |v: &[f64]| softmax_cross_entropy([v[0], v[1]], label).loss;
        assert!(grad_check(f, &s, &out.grad, &[0, 1], EPS) < TOL, "seed {seed}");
    }
}

#[test]
fn matching_matrix_embeddings() {
    let vocab = word_vocab(12);
    for op in [MatchOperator::DotProduct, MatchOperator::Cosine] {
        for seed in 0..SEEDS {
            let mut rng = derive(seed, &[7]);
            let dim = rng.gen_range(1..=6);
            let emb = EmbeddingTable::init(vocab.len(), dim, &mut rng).unwrap();
            let (la, lb) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            let pair = random_pair(&mut rng, &vocab, la, lb, 1);
            let m = matching_matrix(&pair.a, &pair.b, op, Some(&emb)).unwrap();
            let g = rand_tensor(&mut rng, m.shape());
            let rows = matching_matrix_backward(&pair.a, &pair.b, op, Some(&emb), &g).unwrap();
            let mut dense = vec![0.0; emb.vocab_size() * dim];
            for (&r, v) in &rows {
                dense[r * dim..(r + 1) * dim].copy_from_slice(v);
            }
            let f = |v: &[f64]| {
                let e = EmbeddingTable::from_tensor(Tensor::from_vec(&[vocab.len(), dim], v.to_vec()).unwrap()).unwrap();
                inner(matching_matrix(&pair.a, &pair.b, op, Some(&e)).unwrap().data(), g.data())
            };
            let err = grad_check(f, emb.as_tensor().data(), &dense, &all(dense.len()), EPS);
            assert!(err < TOL, "{op} seed {seed}: {err}");
        }
    }
}
