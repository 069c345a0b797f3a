//! Word embedding table and the learned-norm report.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::math::sqrt;
use crate::rng::unit_ball;
use crate::vocab::{Vocabulary, PAD, UNK};
use crate::{Error, Result, Tensor};

/// `[vocab_size, dim]` matrix of word vectors. The PAD row is all zeros and
/// never updated.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    table: Tensor,
}

impl EmbeddingTable {
    /// Every row except PAD is drawn uniformly from the unit ball.
    pub fn init<R: Rng + ?Sized>(vocab_size: usize, dim: usize, rng: &mut R) -> Result<Self> {
        let mut t = Self::zeros(vocab_size, dim)?;
        for id in 0..vocab_size {
            if id != PAD {
                unit_ball(rng, t.row_mut(id));
            }
        }
        Ok(t)
    }

    pub fn zeros(vocab_size: usize, dim: usize) -> Result<Self> {
        if dim == 0 || vocab_size == 0 {
            return Err(Error::Config("embedding table needs dim >= 1 and a non-empty vocabulary".into()));
        }
        Ok(EmbeddingTable { table: Tensor::zeros(&[vocab_size, dim]) })
    }

    pub fn from_tensor(table: Tensor) -> Result<Self> {
        match *table.shape() {
            [v, d] if v > 0 && d > 0 => Ok(EmbeddingTable { table }),
            _ => Err(Error::dim("EmbeddingTable", alloc::format!("expected [vocab, dim], got {:?}", table.shape()))),
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.table.shape()[0]
    }

    pub fn dim(&self) -> usize {
        self.table.shape()[1]
    }

    pub fn row(&self, id: usize) -> &[f64] {
        let d = self.dim();
        &self.table.data()[id * d..(id + 1) * d]
    }

    pub fn row_mut(&mut self, id: usize) -> &mut [f64] {
        let d = self.dim();
        &mut self.table.data_mut()[id * d..(id + 1) * d]
    }

    pub fn norm(&self, id: usize) -> f64 {
        sqrt(self.row(id).iter().map(|v| v * v).sum())
    }

    pub fn as_tensor(&self) -> &Tensor {
        &self.table
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        self.table.data_mut()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    /// Largest norms first.
    pub top: Vec<(String, f64)>,
    /// Smallest norms first.
    pub bottom: Vec<(String, f64)>,
}

/// All regular tokens ranked by embedding L2 norm, largest first.
/// Ties keep id order.
pub fn ranked_norms(emb: &EmbeddingTable, vocab: &Vocabulary) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = (0..vocab.len().min(emb.vocab_size()))
        .filter(|&id| id != PAD && id != UNK)
        .map(|id| (vocab.token(id).unwrap_or_default().to_string(), emb.norm(id)))
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1));
    all
}

/// The `k` tokens with the largest and the `k` with the smallest norms.
pub fn embedding_norms(emb: &EmbeddingTable, vocab: &Vocabulary, k: usize) -> NormReport {
    let all = ranked_norms(emb, vocab);
    let top = all.iter().take(k).cloned().collect();
    let bottom = all.iter().rev().take(k).cloned().collect();
    NormReport { top, bottom }
}
