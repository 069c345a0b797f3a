//! Central-difference gradient checking.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::Rng;

use crate::data::TextPair;
use crate::model::{backward, eval_loss, forward, Mode, ModelConfig, ModelParams, ParamGroup};
use crate::Result;

/// `|analytic - numeric| / max(|analytic|, |numeric|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Worst relative error between `analytic` and the central difference
/// `(f(x + eps e_i) - f(x - eps e_i)) / 2 eps` over `coords`. No coordinates
/// means an error of 0.
pub fn grad_check<F>(mut f: F, x: &[f64], analytic: &[f64], coords: &[usize], eps: f64) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    let mut worst: f64 = 0.0;
    for &i in coords {
        let orig = probe[i];
        probe[i] = orig + eps;
        let up = f(&probe);
        probe[i] = orig - eps;
        let down = f(&probe);
        probe[i] = orig;
        worst = worst.max(relative_error(analytic[i], (up - down) / (2.0 * eps)));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupCheck {
    pub group: ParamGroup,
    pub coords_checked: usize,
    pub max_rel_error: f64,
}

/// Checks back-propagation through the whole network on one labelled pair,
/// with dropout disabled. Each parameter group is checked on at most
/// `max_coords` sampled coordinates; for the embedding table the rows of
/// the pair's tokens are preferred, with a few untouched rows mixed in.
pub fn check_model<R: Rng + ?Sized>(
    pair: &TextPair,
    params: &ModelParams,
    config: &ModelConfig,
    eps: f64,
    max_coords: usize,
    rng: &mut R,
) -> Result<Vec<GroupCheck>> {
    let config = ModelConfig { dropout_rate: 0.0, ..config.clone() };
    let (_, cache) = forward(pair, params, &config, Mode::Train, rng)?;
    let (_, grads) = backward(&cache, pair.label, params, &config)?;
    let dim = params.embeddings.as_ref().map_or(1, |e| e.dim());
    let mut out = Vec::new();
    for g in ParamGroup::ALL {
        let Some(x) = params.group(g) else { continue };
        let coords = match g {
            ParamGroup::Embeddings => {
                let touched: BTreeSet<usize> = pair.a.ids.iter().chain(&pair.b.ids).copied().collect();
                let mut c: Vec<usize> = touched.iter().flat_map(|&r| r * dim..(r + 1) * dim).collect();
                let rows = x.len() / dim;
                for _ in 0..3.min(rows) {
                    let r = rng.gen_range(0..rows);
                    c.extend(r * dim..(r + 1) * dim);
                }
                if c.len() > max_coords {
                    c = sample(rng, c.len(), max_coords).into_iter().map(|i| c[i]).collect();
                }
                c
            }
            _ if x.len() <= max_coords => (0..x.len()).collect(),
            _ => sample(rng, x.len(), max_coords).into_vec(),
        };
        let mut analytic = alloc::vec![0.0; x.len()];
        for &i in &coords {
            analytic[i] = grads.coordinate(g, i, dim);
        }
        let mut scratch = params.clone();
        let err = grad_check(
            |v| {
                scratch.group_mut(g).expect("group present").copy_from_slice(v);
                eval_loss(pair, &scratch, &config).expect("forward succeeded once already")
            },
            x,
            &analytic,
            &coords,
            eps,
        );
        out.push(GroupCheck { group: g, coords_checked: coords.len(), max_rel_error: err });
    }
    Ok(out)
}
