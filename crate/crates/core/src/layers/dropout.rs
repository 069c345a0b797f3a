use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

/// Inverted dropout. In training mode each element is zeroed with
/// probability `rate` and survivors are scaled by `1 / (1 - rate)`; the
/// returned mask holds the per-element multiplier. Evaluation mode is the
/// identity with an all-ones mask.
pub fn dropout<R: Rng + ?Sized>(x: &[f64], rate: f64, training: bool, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Config(format!("dropout rate must be in [0, 1), got {rate}")));
    }
    if !training || rate == 0.0 {
        return Ok((x.to_vec(), vec![1.0; x.len()]));
    }
    let keep = 1.0 / (1.0 - rate);
    let mask: Vec<f64> = x.iter().map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep }).collect();
    let y = x.iter().zip(&mask).map(|(v, m)| v * m).collect();
    Ok((y, mask))
}

pub fn dropout_backward(mask: &[f64], grad_out: &[f64]) -> Result<Vec<f64>> {
    if mask.len() != grad_out.len() {
        return Err(Error::dim("dropout_backward", format!("mask {} vs grad {}", mask.len(), grad_out.len())));
    }
    Ok(mask.iter().zip(grad_out).map(|(m, g)| m * g).collect())
}
