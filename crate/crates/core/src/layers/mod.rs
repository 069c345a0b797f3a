//! Differentiable layer primitives with hand-written backward passes.
//!
//! All layers are free functions over explicit inputs and parameters; the
//! caller keeps whatever the backward pass needs.

mod activation;
mod conv;
mod dropout;
mod linear;
mod loss;
mod pool;

pub use activation::{relu_backward, relu_forward, relu_in_place};
pub use conv::{conv2d_backward, conv2d_forward, ConvLayerParams, Padding};
pub use dropout::{dropout, dropout_backward};
pub use linear::{linear_backward, linear_forward, LinearLayerParams};
pub use loss::{softmax_cross_entropy, SoftmaxOutput};
pub use pool::{max_pool_backward, max_pool_forward, window_range, PoolGeometry, PoolIndices, PoolKind};
