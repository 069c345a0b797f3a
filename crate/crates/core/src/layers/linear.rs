use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::sqrt;
use crate::{Error, Result, Tensor};

/// Fully connected layer `y = W z + b`, `W` is `[out_dim, in_dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLayerParams {
    pub weight: Tensor,
    pub bias: Vec<f64>,
}

impl LinearLayerParams {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Result<Self> {
        if out_dim == 0 || in_dim == 0 {
            return Err(Error::Config(format!("linear layer needs positive sizes, got {out_dim}x{in_dim}")));
        }
        Ok(LinearLayerParams { weight: Tensor::zeros(&[out_dim, in_dim]), bias: vec![0.0; out_dim] })
    }

    /// Uniform in `+-sqrt(6 / (in + out))`, zero bias.
    pub fn init<R: Rng + ?Sized>(out_dim: usize, in_dim: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::zeros(out_dim, in_dim)?;
        let bound = sqrt(6.0 / (in_dim + out_dim) as f64);
        for w in p.weight.data_mut() {
            *w = rng.gen_range(-bound..bound);
        }
        Ok(p)
    }

    pub fn from_parts(weight: Tensor, bias: Vec<f64>) -> Result<Self> {
        match *weight.shape() {
            [o, i] if o > 0 && i > 0 && bias.len() == o => Ok(LinearLayerParams { weight, bias }),
            _ => Err(Error::dim(
                "LinearLayerParams",
                format!("weight {:?} with {} biases", weight.shape(), bias.len()),
            )),
        }
    }

    pub fn out_dim(&self) -> usize {
        self.weight.shape()[0]
    }

    pub fn in_dim(&self) -> usize {
        self.weight.shape()[1]
    }
}

pub fn linear_forward(z: &[f64], params: &LinearLayerParams) -> Result<Vec<f64>> {
    check_input("linear_forward", z, params)?;
    let n = params.in_dim();
    Ok(params
        .weight
        .data()
        .chunks_exact(n)
        .zip(&params.bias)
        .map(|(row, b)| row.iter().zip(z).map(|(w, x)| w * x).sum::<f64>() + b)
        .collect())
}

/// Returns `(dL/dz, dL/dW and dL/db)` for upstream gradient `grad_out`.
pub fn linear_backward(z: &[f64], params: &LinearLayerParams, grad_out: &[f64]) -> Result<(Vec<f64>, LinearLayerParams)> {
    check_input("linear_backward", z, params)?;
    if grad_out.len() != params.out_dim() {
        return Err(Error::dim(
            "linear_backward",
            format!("grad_out has {} entries, layer output is {}", grad_out.len(), params.out_dim()),
        ));
    }
    let n = params.in_dim();
    let mut grad_z = vec![0.0; n];
    let mut grads = LinearLayerParams::zeros(params.out_dim(), n)?;
    for ((row, g_row), &g) in params.weight.data().chunks_exact(n).zip(grads.weight.data_mut().chunks_exact_mut(n)).zip(grad_out) {
        for ((gz, gw), (&w, &x)) in grad_z.iter_mut().zip(g_row.iter_mut()).zip(row.iter().zip(z)) {
            *gz += g * w;
            *gw = g * x;
        }
    }
    grads.bias.copy_from_slice(grad_out);
    Ok((grad_z, grads))
}

fn check_input(op: &'static str, z: &[f64], params: &LinearLayerParams) -> Result<()> {
    if z.len() != params.in_dim() {
        return Err(Error::dim(op, format!("input has {} entries, weight in_dim is {}", z.len(), params.in_dim())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_weight_passes_input() {
        let w = Tensor::from_vec(&[2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let p = LinearLayerParams::from_parts(w, vec![0.0, 0.0]).unwrap();
        assert_eq!(linear_forward(&[3.0, -4.0], &p).unwrap(), vec![3.0, -4.0]);
    }

    #[test]
    fn small_affine_map() {
        let w = Tensor::from_vec(&[1, 2], vec![1.0, 1.0]).unwrap();
        let p = LinearLayerParams::from_parts(w, vec![1.0]).unwrap();
        assert_eq!(linear_forward(&[2.0, 3.0], &p).unwrap(), vec![6.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let p = LinearLayerParams::zeros(2, 3).unwrap();
        assert!(linear_forward(&[1.0, 2.0], &p).is_err());
        assert!(linear_backward(&[1.0, 2.0, 3.0], &p, &[1.0]).is_err());
    }
}
