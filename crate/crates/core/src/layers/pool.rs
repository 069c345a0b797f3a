use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    /// Window sizes derived from the input length so the output grid is
    /// always `out_h x out_w`.
    Dynamic { out_h: usize, out_w: usize },
    /// Fixed non-overlapping windows; output is `ceil(H / window_h)` rows.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolGeometry {
    pub window_h: usize,
    pub window_w: usize,
    pub kind: PoolKind,
}

impl PoolGeometry {
    pub fn fixed(window_h: usize, window_w: usize) -> Self {
        PoolGeometry { window_h, window_w, kind: PoolKind::Fixed }
    }

    /// Windows `ceil(n / out_h) x ceil(m / out_w)` for an `n x m` input.
    pub fn dynamic(n: usize, m: usize, out_h: usize, out_w: usize) -> Result<Self> {
        if n == 0 || m == 0 || out_h == 0 || out_w == 0 {
            return Err(Error::Geometry {
                op: "dynamic_pool_geometry",
                detail: format!("all sizes must be positive, got n={n} m={m} grid={out_h}x{out_w}"),
            });
        }
        Ok(PoolGeometry {
            window_h: n.div_ceil(out_h),
            window_w: m.div_ceil(out_w),
            kind: PoolKind::Dynamic { out_h, out_w },
        })
    }

    fn output_dims(&self, h: usize, w: usize) -> Result<(usize, usize)> {
        let op = "max_pool_forward";
        if self.window_h == 0 || self.window_w == 0 {
            return Err(Error::Geometry { op, detail: "window sizes must be positive".into() });
        }
        match self.kind {
            PoolKind::Fixed => {
                if self.window_h > h || self.window_w > w {
                    return Err(Error::Geometry {
                        op,
                        detail: format!("window {}x{} exceeds input {h}x{w}", self.window_h, self.window_w),
                    });
                }
                Ok((h.div_ceil(self.window_h), w.div_ceil(self.window_w)))
            }
            PoolKind::Dynamic { out_h, out_w } => {
                if out_h == 0 || out_w == 0 {
                    return Err(Error::Geometry { op, detail: "output grid must be positive".into() });
                }
                if self.window_h * out_h < h || self.window_w * out_w < w {
                    return Err(Error::Geometry {
                        op,
                        detail: format!(
                            "windows {}x{} over a {out_h}x{out_w} grid do not cover input {h}x{w}",
                            self.window_h, self.window_w
                        ),
                    });
                }
                Ok((out_h, out_w))
            }
        }
    }
}

/// Input rows covered by output cell `i` with window size `d` over `len` rows.
///
/// The trailing window is truncated at the edge. A window that starts past
/// the edge (possible when the grid is larger than the input) re-reads the
/// last row instead of pooling nothing.
pub fn window_range(i: usize, d: usize, len: usize) -> core::ops::Range<usize> {
    let start = i * d;
    if start >= len {
        len - 1..len
    } else {
        start..(start + d).min(len)
    }
}

/// Argmax bookkeeping from a forward pass; one flat input index per output cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolIndices {
    input_shape: [usize; 3],
    output_shape: [usize; 3],
    argmax: Vec<usize>,
}

impl PoolIndices {
    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    pub fn output_shape(&self) -> &[usize] {
        &self.output_shape
    }

    pub fn argmax(&self) -> &[usize] {
        &self.argmax
    }
}

/// Max over each window. Ties resolve to the first position in row-major
/// order.
pub fn max_pool_forward(input: &Tensor, geom: &PoolGeometry) -> Result<(Tensor, PoolIndices)> {
    let (c, h, w) = input.dims3("max_pool_forward")?;
    let (out_h, out_w) = geom.output_dims(h, w)?;
    let x = input.data();
    let mut out = Vec::with_capacity(c * out_h * out_w);
    let mut argmax = Vec::with_capacity(c * out_h * out_w);
    for k in 0..c {
        for i in 0..out_h {
            let rows = window_range(i, geom.window_h, h);
            for j in 0..out_w {
                let cols = window_range(j, geom.window_w, w);
                let mut best = (k * h + rows.start) * w + cols.start;
                for r in rows.clone() {
                    for q in cols.clone() {
                        let idx = (k * h + r) * w + q;
                        if x[idx] > x[best] {
                            best = idx;
                        }
                    }
                }
                out.push(x[best]);
                argmax.push(best);
            }
        }
    }
    let output_shape = [c, out_h, out_w];
    Ok((Tensor::from_vec(&output_shape, out)?, PoolIndices { input_shape: [c, h, w], output_shape, argmax }))
}

/// Routes each output gradient to its argmax input; overlapping windows add up.
pub fn max_pool_backward(indices: &PoolIndices, grad_out: &Tensor) -> Result<Tensor> {
    if grad_out.shape() != indices.output_shape {
        return Err(Error::dim(
            "max_pool_backward",
            format!(
                "grad_out shape {:?} does not match pooled shape {:?} from the forward pass",
                grad_out.shape(),
                indices.output_shape
            ),
        ));
    }
    let mut grad_in = Tensor::zeros(&indices.input_shape);
    let gi = grad_in.data_mut();
    for (&idx, &g) in indices.argmax.iter().zip(grad_out.data()) {
        gi[idx] += g;
    }
    Ok(grad_in)
}
