use crate::math::{exp, ln};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftmaxOutput {
    /// `-ln p[label]`
    pub loss: f64,
    pub probs: [f64; 2],
    /// `probs - onehot(label)`
    pub grad: [f64; 2],
}

/// Two-class softmax with cross-entropy against `label` (0 or 1).
///
/// # Panics
/// If `label > 1`.
pub fn softmax_cross_entropy(scores: [f64; 2], label: u8) -> SoftmaxOutput {
    assert!(label <= 1, "binary label expected, got {label}");
    let top = scores[0].max(scores[1]);
    let e0 = exp(scores[0] - top);
    let e1 = exp(scores[1] - top);
    let z = e0 + e1;
    let probs = [e0 / z, e1 / z];
    let l = label as usize;
    // log-sum-exp form keeps the loss finite when p[label] underflows.
    let loss = ln(z) - (scores[l] - top);
    let mut grad = probs;
    grad[l] -= 1.0;
    SoftmaxOutput { loss, probs, grad }
}
