use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::sqrt;
use crate::{Error, Result, Tensor};

/// Zero padding applied before a stride-1 convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// Output has the input's spatial size. For even kernels the extra
    /// padding row/column goes after the input.
    #[default]
    Same,
    /// No padding; output shrinks by `r - 1` on each axis.
    Valid,
}

impl Padding {
    /// Zero rows (or columns) added before and after an axis for kernel size `r`.
    pub fn amounts(self, r: usize) -> (usize, usize) {
        match self {
            Padding::Same => {
                let before = (r - 1) / 2;
                (before, r - 1 - before)
            }
            Padding::Valid => (0, 0),
        }
    }

    fn output_len(self, len: usize, r: usize) -> Option<usize> {
        let (before, after) = self.amounts(r);
        (len + before + after + 1).checked_sub(r).filter(|&n| n > 0)
    }
}

/// Square kernels `[out_maps, in_maps, r, r]` plus one bias per output map.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayerParams {
    pub kernels: Tensor,
    pub bias: Vec<f64>,
}

impl ConvLayerParams {
    pub fn zeros(out_maps: usize, in_maps: usize, r: usize) -> Result<Self> {
        if out_maps == 0 || in_maps == 0 || r == 0 {
            return Err(Error::Config(format!(
                "conv layer needs positive sizes, got out_maps={out_maps} in_maps={in_maps} r={r}"
            )));
        }
        Ok(ConvLayerParams { kernels: Tensor::zeros(&[out_maps, in_maps, r, r]), bias: vec![0.0; out_maps] })
    }

    /// He-uniform kernels, zero bias.
    pub fn init<R: Rng + ?Sized>(out_maps: usize, in_maps: usize, r: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::zeros(out_maps, in_maps, r)?;
        let bound = sqrt(6.0 / (in_maps * r * r) as f64);
        for w in p.kernels.data_mut() {
            *w = rng.gen_range(-bound..bound);
        }
        Ok(p)
    }

    /// Wraps existing tensors after checking they describe square kernels.
    pub fn from_parts(kernels: Tensor, bias: Vec<f64>) -> Result<Self> {
        match *kernels.shape() {
            [o, i, r, r2] if o > 0 && i > 0 && r > 0 && r == r2 => {
                if bias.len() != o {
                    return Err(Error::dim("ConvLayerParams", format!("{o} output maps but {} biases", bias.len())));
                }
                Ok(ConvLayerParams { kernels, bias })
            }
            _ => Err(Error::dim(
                "ConvLayerParams",
                format!("kernels must be [out, in, r, r] with r > 0, got {:?}", kernels.shape()),
            )),
        }
    }

    pub fn out_maps(&self) -> usize {
        self.kernels.shape()[0]
    }

    pub fn in_maps(&self) -> usize {
        self.kernels.shape()[1]
    }

    pub fn kernel_size(&self) -> usize {
        self.kernels.shape()[2]
    }

    #[inline]
    fn weight(&self, k: usize, c: usize, s: usize, t: usize) -> f64 {
        let r = self.kernel_size();
        self.kernels.data()[((k * self.in_maps() + c) * r + s) * r + t]
    }
}

struct Geometry {
    c_in: usize,
    h: usize,
    w: usize,
    out_h: usize,
    out_w: usize,
    r: usize,
    pad: usize,
}

impl Geometry {
    fn new(op: &'static str, input: &Tensor, params: &ConvLayerParams, padding: Padding) -> Result<Self> {
        let (c_in, h, w) = input.dims3(op)?;
        if c_in != params.in_maps() {
            return Err(Error::dim(
                op,
                format!("input channel axis is {c_in} but kernels expect {} input maps", params.in_maps()),
            ));
        }
        let r = params.kernel_size();
        let out_h = padding
            .output_len(h, r)
            .ok_or_else(|| Error::dim(op, format!("height axis {h} is smaller than kernel {r}")))?;
        let out_w = padding
            .output_len(w, r)
            .ok_or_else(|| Error::dim(op, format!("width axis {w} is smaller than kernel {r}")))?;
        Ok(Geometry { c_in, h, w, out_h, out_w, r, pad: padding.amounts(r).0 })
    }

    /// Kernel offsets `s` for which `i + s - pad` lands inside `0..len`.
    #[inline]
    fn taps(&self, i: usize, len: usize) -> core::ops::Range<usize> {
        let lo = self.pad.saturating_sub(i);
        let hi = (len + self.pad).saturating_sub(i).min(self.r);
        lo..hi.max(lo)
    }
}

/// Stride-1 cross-correlation, pre-activation:
/// `out[k][i][j] = sum_c sum_s sum_t w[k][c][s][t] * x_pad[c][i+s][j+t] + b[k]`.
///
/// Padded cells are skipped rather than multiplied; the accumulation order
/// over the remaining `(c, s, t)` terms is the plain nested order, so the
/// result is bit-identical to summing over an explicitly zero-padded input.
pub fn conv2d_forward(input: &Tensor, params: &ConvLayerParams, padding: Padding) -> Result<Tensor> {
    let g = Geometry::new("conv2d_forward", input, params, padding)?;
    let c_out = params.out_maps();
    let x = input.data();
    let wk = params.kernels.data();
    let mut out = Tensor::zeros(&[c_out, g.out_h, g.out_w]);
    let o = out.data_mut();
    for k in 0..c_out {
        for i in 0..g.out_h {
            let rows = g.taps(i, g.h);
            for j in 0..g.out_w {
                let cols = g.taps(j, g.w);
                let mut acc = 0.0;
                for c in 0..g.c_in {
                    let x_c = &x[c * g.h * g.w..(c + 1) * g.h * g.w];
                    let w_kc = &wk[(k * g.c_in + c) * g.r * g.r..(k * g.c_in + c + 1) * g.r * g.r];
                    for s in rows.clone() {
                        let x_row = &x_c[(i + s - g.pad) * g.w..];
                        let w_row = &w_kc[s * g.r..(s + 1) * g.r];
                        for t in cols.clone() {
                            acc += w_row[t] * x_row[j + t - g.pad];
                        }
                    }
                }
                o[(k * g.out_h + i) * g.out_w + j] = acc + params.bias[k];
            }
        }
    }
    Ok(out)
}

/// Gradients of `sum(grad_out * conv2d_forward(input))` with respect to the
/// input, the kernels and the biases.
pub fn conv2d_backward(
    input: &Tensor,
    params: &ConvLayerParams,
    padding: Padding,
    grad_out: &Tensor,
) -> Result<(Tensor, ConvLayerParams)> {
    let g = Geometry::new("conv2d_backward", input, params, padding)?;
    let c_out = params.out_maps();
    grad_out.expect_shape("conv2d_backward", &[c_out, g.out_h, g.out_w])?;
    let x = input.data();
    let go = grad_out.data();
    let mut grad_in = Tensor::zeros(input.shape());
    let mut grad_p = ConvLayerParams::zeros(c_out, g.c_in, g.r)?;
    {
        let gi = grad_in.data_mut();
        let gw = grad_p.kernels.data_mut();
        for k in 0..c_out {
            for i in 0..g.out_h {
                let rows = g.taps(i, g.h);
                for j in 0..g.out_w {
                    let d = go[(k * g.out_h + i) * g.out_w + j];
                    if d == 0.0 {
                        continue;
                    }
                    grad_p.bias[k] += d;
                    let cols = g.taps(j, g.w);
                    for c in 0..g.c_in {
                        for s in rows.clone() {
                            let row = i + s - g.pad;
                            for t in cols.clone() {
                                let col = j + t - g.pad;
                                let xi = (c * g.h + row) * g.w + col;
                                let wi = ((k * g.c_in + c) * g.r + s) * g.r + t;
                                gw[wi] += d * x[xi];
                                gi[xi] += d * params.weight(k, c, s, t);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((grad_in, grad_p))
}
