//! Adagrad.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Gradients, ModelParams, ParamGroup};
use crate::vocab::PAD;

/// One Adagrad step in place: `state += g^2; param -= lr * g / (sqrt(state) + eps)`.
/// Coordinates with a zero gradient are left untouched.
pub fn adagrad_update(params: &mut [f64], grads: &[f64], state: &mut [f64], lr: f64, eps: f64) {
    debug_assert!(params.len() == grads.len() && grads.len() == state.len());
    for ((p, &g), s) in params.iter_mut().zip(grads).zip(state.iter_mut()) {
        if g == 0.0 {
            continue;
        }
        *s += g * g;
        *p -= lr * g / (crate::math::sqrt(*s) + eps);
    }
}

/// Squared-gradient accumulators for every parameter group.
#[derive(Debug, Clone, PartialEq)]
pub struct AdagradState {
    accum: Vec<(ParamGroup, Vec<f64>)>,
}

impl AdagradState {
    pub fn new(params: &ModelParams) -> Self {
        let accum = ParamGroup::ALL
            .iter()
            .filter_map(|&g| params.group(g).map(|s| (g, vec![0.0; s.len()])))
            .collect();
        AdagradState { accum }
    }

    pub fn accumulator(&self, g: ParamGroup) -> Option<&[f64]> {
        self.accum.iter().find(|(k, _)| *k == g).map(|(_, v)| v.as_slice())
    }

    /// Applies `grads` to `params`. Embedding rows absent from the sparse
    /// gradient, and the PAD row, are not touched.
    pub fn step(&mut self, params: &mut ModelParams, grads: &Gradients, lr: f64, eps: f64) {
        let dim = params.embeddings.as_ref().map_or(0, |e| e.dim());
        for (g, acc) in &mut self.accum {
            let Some(p) = params.group_mut(*g) else { continue };
            match *g {
                ParamGroup::Embeddings => {
                    for (&row, gr) in &grads.embeddings {
                        if row == PAD {
                            continue;
                        }
                        let r = row * dim..(row + 1) * dim;
                        adagrad_update(&mut p[r.clone()], gr, &mut acc[r], lr, eps);
                    }
                }
                _ => adagrad_update(p, grads.group(*g).expect("dense group"), acc, lr, eps),
            }
        }
    }
}
