//! Matching matrices: the word-by-word similarity image of two texts.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::data::Text;
use crate::embedding::EmbeddingTable;
use crate::vocab::PAD;
use crate::{Error, Result, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchOperator {
    /// 1 where the surface tokens are identical, else 0.
    Indicator,
    /// Cosine of the two word vectors; 0 if either vector is zero.
    Cosine,
    /// Inner product of the two word vectors.
    DotProduct,
}

impl MatchOperator {
    pub fn needs_embeddings(self) -> bool {
        !matches!(self, MatchOperator::Indicator)
    }

    pub fn name(self) -> &'static str {
        match self {
            MatchOperator::Indicator => "ind",
            MatchOperator::Cosine => "cos",
            MatchOperator::DotProduct => "dot",
        }
    }
}

impl fmt::Display for MatchOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatchOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ind" | "indicator" => Ok(MatchOperator::Indicator),
            "cos" | "cosine" => Ok(MatchOperator::Cosine),
            "dot" | "dotproduct" | "dot-product" => Ok(MatchOperator::DotProduct),
            _ => Err(Error::Config(format!("unknown matching operator {s:?} (expected ind, cos or dot)"))),
        }
    }
}

/// Sparse per-row embedding gradients, keyed by token id.
pub type RowGrads = BTreeMap<usize, Vec<f64>>;

fn embeddings_for(op: MatchOperator, emb: Option<&EmbeddingTable>) -> Result<&EmbeddingTable> {
    emb.ok_or_else(|| Error::Config(format!("the {op} operator needs an embedding table")))
}

fn check_ids(emb: &EmbeddingTable, t: &Text) -> Result<()> {
    match t.ids.iter().find(|&&id| id >= emb.vocab_size()) {
        Some(id) => Err(Error::Input(format!("token id {id} outside embedding table of {} rows", emb.vocab_size()))),
        None => Ok(()),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `[1, len(a), len(b)]` matrix with `M[i][j] = a_i (op) b_j`. Rows follow `a`.
pub fn matching_matrix(a: &Text, b: &Text, op: MatchOperator, emb: Option<&EmbeddingTable>) -> Result<Tensor> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Input(String::from("matching_matrix needs two non-empty texts")));
    }
    let (m, n) = (a.len(), b.len());
    let mut out = vec![0.0; m * n];
    match op {
        MatchOperator::Indicator => {
            for (i, wa) in a.tokens.iter().enumerate() {
                for (j, wb) in b.tokens.iter().enumerate() {
                    if wa == wb {
                        out[i * n + j] = 1.0;
                    }
                }
            }
        }
        MatchOperator::Cosine | MatchOperator::DotProduct => {
            let emb = embeddings_for(op, emb)?;
            check_ids(emb, a)?;
            check_ids(emb, b)?;
            let cosine = op == MatchOperator::Cosine;
            let norms_b: Vec<f64> = b.ids.iter().map(|&id| emb.norm(id)).collect();
            for (i, &ia) in a.ids.iter().enumerate() {
                let ra = emb.row(ia);
                let na = emb.norm(ia);
                for (j, &ib) in b.ids.iter().enumerate() {
                    let d = dot(ra, emb.row(ib));
                    out[i * n + j] = if !cosine {
                        d
                    } else if na == 0.0 || norms_b[j] == 0.0 {
                        0.0
                    } else {
                        // Clamp rounding excursions so entries stay in [-1, 1].
                        (d / (na * norms_b[j])).clamp(-1.0, 1.0)
                    };
                }
            }
        }
    }
    Tensor::from_vec(&[1, m, n], out)
}

/// Embedding-row gradients given `dL/dM`. Empty for the indicator operator;
/// only rows of tokens present in the pair appear, PAD never does.
pub fn matching_matrix_backward(
    a: &Text,
    b: &Text,
    op: MatchOperator,
    emb: Option<&EmbeddingTable>,
    grad_m: &Tensor,
) -> Result<RowGrads> {
    let (m, n) = (a.len(), b.len());
    grad_m.expect_shape("matching_matrix_backward", &[1, m, n])?;
    let mut grads = RowGrads::new();
    if op == MatchOperator::Indicator {
        return Ok(grads);
    }
    let emb = embeddings_for(op, emb)?;
    let dim = emb.dim();
    let g = grad_m.data();
    let mut add = |id: usize, v: &[f64]| {
        if id == PAD {
            return;
        }
        let row = grads.entry(id).or_insert_with(|| vec![0.0; dim]);
        for (r, x) in row.iter_mut().zip(v) {
            *r += x;
        }
    };
    match op {
        MatchOperator::DotProduct => {
            for (i, &ia) in a.ids.iter().enumerate() {
                let mut acc = vec![0.0; dim];
                for (j, &ib) in b.ids.iter().enumerate() {
                    let gij = g[i * n + j];
                    for (s, y) in acc.iter_mut().zip(emb.row(ib)) {
                        *s += gij * y;
                    }
                }
                add(ia, &acc);
            }
            for (j, &ib) in b.ids.iter().enumerate() {
                let mut acc = vec![0.0; dim];
                for (i, &ia) in a.ids.iter().enumerate() {
                    let gij = g[i * n + j];
                    for (s, x) in acc.iter_mut().zip(emb.row(ia)) {
                        *s += gij * x;
                    }
                }
                add(ib, &acc);
            }
        }
        MatchOperator::Cosine => {
            // d cos(u, v) / du = (v_hat - cos * u_hat) / |u|
            let unit = |id: usize| -> (Vec<f64>, f64) {
                let nrm = emb.norm(id);
                let u = if nrm == 0.0 { vec![0.0; dim] } else { emb.row(id).iter().map(|x| x / nrm).collect() };
                (u, nrm)
            };
            let ua: Vec<(Vec<f64>, f64)> = a.ids.iter().map(|&id| unit(id)).collect();
            let ub: Vec<(Vec<f64>, f64)> = b.ids.iter().map(|&id| unit(id)).collect();
            let mut partial = |self_side: &[(Vec<f64>, f64)], other: &[(Vec<f64>, f64)], ids: &[usize], row_major: bool| {
                for (p, (u, nu)) in self_side.iter().enumerate() {
                    if *nu == 0.0 {
                        continue;
                    }
                    let mut acc = vec![0.0; dim];
                    for (q, (v, nv)) in other.iter().enumerate() {
                        if *nv == 0.0 {
                            continue;
                        }
                        let gpq = if row_major { g[p * n + q] } else { g[q * n + p] };
                        let c = dot(u, v);
                        for ((s, vv), uu) in acc.iter_mut().zip(v).zip(u) {
                            *s += gpq * (vv - c * uu) / nu;
                        }
                    }
                    add(ids[p], &acc);
                }
            };
            partial(&ua, &ub, &a.ids, true);
            partial(&ub, &ua, &b.ids, false);
        }
        MatchOperator::Indicator => unreachable!(),
    }
    Ok(grads)
}
