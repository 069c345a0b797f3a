//! The full matching network:
//! matching matrix -> conv1 -> ReLU -> dynamic max-pool -> conv2 -> ReLU ->
//! fixed max-pool -> flatten -> linear -> ReLU -> dropout -> linear -> scores.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::data::{Text, TextPair};
use crate::embedding::EmbeddingTable;
use crate::layers::{
    conv2d_backward, conv2d_forward, dropout, dropout_backward, linear_backward, linear_forward, max_pool_backward,
    max_pool_forward, relu_backward, relu_forward, relu_in_place, softmax_cross_entropy, ConvLayerParams,
    LinearLayerParams, Padding, PoolGeometry, PoolIndices,
};
use crate::matching::{matching_matrix, matching_matrix_backward, MatchOperator, RowGrads};
use crate::{Error, Result, Tensor};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub operator: MatchOperator,
    pub conv1_maps: usize,
    pub conv2_maps: usize,
    pub kernel1: usize,
    pub kernel2: usize,
    /// Output grid `(rows, cols)` of the dynamic pooling stage.
    pub pool_grid: (usize, usize),
    /// Window of the second, fixed max-pooling stage.
    pub fixed_pool: (usize, usize),
    pub mlp_hidden: usize,
    pub dropout_rate: f64,
    /// Word vector size for the cosine and dot operators.
    pub embedding_dim: usize,
    pub padding: Padding,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            operator: MatchOperator::Indicator,
            conv1_maps: 8,
            conv2_maps: 16,
            kernel1: 5,
            kernel2: 3,
            pool_grid: (10, 10),
            fixed_pool: (2, 2),
            mlp_hidden: 128,
            dropout_rate: 0.5,
            embedding_dim: 50,
            padding: Padding::Same,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let sizes = [
            ("conv1_maps", self.conv1_maps),
            ("conv2_maps", self.conv2_maps),
            ("kernel1", self.kernel1),
            ("kernel2", self.kernel2),
            ("pool_rows", self.pool_grid.0),
            ("pool_cols", self.pool_grid.1),
            ("fixed_pool_rows", self.fixed_pool.0),
            ("fixed_pool_cols", self.fixed_pool.1),
            ("mlp_hidden", self.mlp_hidden),
            ("embedding_dim", self.embedding_dim),
        ];
        if let Some((name, _)) = sizes.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!("dropout_rate must be in [0, 1), got {}", self.dropout_rate)));
        }
        let (h, w) = self.conv2_out_dims();
        if self.fixed_pool.0 > h || self.fixed_pool.1 > w {
            return Err(Error::Config(format!(
                "fixed pool {:?} larger than the second conv output {h}x{w}",
                self.fixed_pool
            )));
        }
        Ok(())
    }

    fn conv2_out_dims(&self) -> (usize, usize) {
        let (b, a) = self.padding.amounts(self.kernel2);
        let shrink = |n: usize| (n + a + b + 1).saturating_sub(self.kernel2);
        (shrink(self.pool_grid.0), shrink(self.pool_grid.1))
    }

    /// Length of the flattened second-stage feature maps (the MLP input).
    pub fn flat_dim(&self) -> usize {
        let (h, w) = self.conv2_out_dims();
        self.conv2_maps * h.div_ceil(self.fixed_pool.0) * w.div_ceil(self.fixed_pool.1)
    }

    /// Flat `key = value` view, shared by checkpoints and config files.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let pad = match self.padding {
            Padding::Same => "same",
            Padding::Valid => "valid",
        };
        [
            ("operator", self.operator.name().to_string()),
            ("conv1_maps", self.conv1_maps.to_string()),
            ("conv2_maps", self.conv2_maps.to_string()),
            ("kernel1", self.kernel1.to_string()),
            ("kernel2", self.kernel2.to_string()),
            ("pool_rows", self.pool_grid.0.to_string()),
            ("pool_cols", self.pool_grid.1.to_string()),
            ("fixed_pool_rows", self.fixed_pool.0.to_string()),
            ("fixed_pool_cols", self.fixed_pool.1.to_string()),
            ("mlp_hidden", self.mlp_hidden.to_string()),
            ("dropout_rate", format!("{:?}", self.dropout_rate)),
            ("embedding_dim", self.embedding_dim.to_string()),
            ("padding", pad.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// Applies one `key = value` setting. Returns `Ok(false)` for keys that
    /// are not model settings.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn num<T: core::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
        }
        match key {
            "operator" => self.operator = value.trim().parse()?,
            "conv1_maps" => self.conv1_maps = num(key, value)?,
            "conv2_maps" => self.conv2_maps = num(key, value)?,
            "kernel1" => self.kernel1 = num(key, value)?,
            "kernel2" => self.kernel2 = num(key, value)?,
            "pool_rows" => self.pool_grid.0 = num(key, value)?,
            "pool_cols" => self.pool_grid.1 = num(key, value)?,
            "fixed_pool_rows" => self.fixed_pool.0 = num(key, value)?,
            "fixed_pool_cols" => self.fixed_pool.1 = num(key, value)?,
            "mlp_hidden" => self.mlp_hidden = num(key, value)?,
            "dropout_rate" => self.dropout_rate = num(key, value)?,
            "embedding_dim" => self.embedding_dim = num(key, value)?,
            "padding" => {
                self.padding = match value.trim() {
                    "same" => Padding::Same,
                    "valid" => Padding::Valid,
                    v => return Err(Error::Config(format!("padding: expected same or valid, got {v:?}"))),
                }
            }
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// Window sizes `ceil(n / grid_n) x ceil(m / grid_m)` for an `n x m` matrix.
pub fn dynamic_pool_geometry(n: usize, m: usize, grid_n: usize, grid_m: usize) -> Result<PoolGeometry> {
    PoolGeometry::dynamic(n, m, grid_n, grid_m)
}

/// Every learnable weight of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub conv1: ConvLayerParams,
    pub conv2: ConvLayerParams,
    pub fc1: LinearLayerParams,
    pub fc2: LinearLayerParams,
    /// Present for the cosine and dot operators only.
    pub embeddings: Option<EmbeddingTable>,
}

impl ModelParams {
    pub fn init<R: Rng + ?Sized>(config: &ModelConfig, vocab_size: usize, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let conv1 = ConvLayerParams::init(config.conv1_maps, 1, config.kernel1, rng)?;
        let conv2 = ConvLayerParams::init(config.conv2_maps, config.conv1_maps, config.kernel2, rng)?;
        let fc1 = LinearLayerParams::init(config.mlp_hidden, config.flat_dim(), rng)?;
        let fc2 = LinearLayerParams::init(2, config.mlp_hidden, rng)?;
        let embeddings = if config.operator.needs_embeddings() {
            Some(EmbeddingTable::init(vocab_size, config.embedding_dim, rng)?)
        } else {
            None
        };
        Ok(ModelParams { conv1, conv2, fc1, fc2, embeddings })
    }

    pub fn zeros(config: &ModelConfig, vocab_size: usize) -> Result<Self> {
        config.validate()?;
        Ok(ModelParams {
            conv1: ConvLayerParams::zeros(config.conv1_maps, 1, config.kernel1)?,
            conv2: ConvLayerParams::zeros(config.conv2_maps, config.conv1_maps, config.kernel2)?,
            fc1: LinearLayerParams::zeros(config.mlp_hidden, config.flat_dim())?,
            fc2: LinearLayerParams::zeros(2, config.mlp_hidden)?,
            embeddings: if config.operator.needs_embeddings() {
                Some(EmbeddingTable::zeros(vocab_size, config.embedding_dim)?)
            } else {
                None
            },
        })
    }

    /// Checks that every shape agrees with `config`; the error names the
    /// first mismatching tensor.
    pub fn check_config(&self, config: &ModelConfig) -> Result<()> {
        config.validate()?;
        let expect = |name: &str, got: &[usize], want: &[usize]| -> Result<()> {
            if got != want {
                return Err(Error::dim("ModelParams", format!("{name} has shape {got:?}, config expects {want:?}")));
            }
            Ok(())
        };
        expect("conv1.kernels", self.conv1.kernels.shape(), &[config.conv1_maps, 1, config.kernel1, config.kernel1])?;
        expect(
            "conv2.kernels",
            self.conv2.kernels.shape(),
            &[config.conv2_maps, config.conv1_maps, config.kernel2, config.kernel2],
        )?;
        expect("fc1.weight", self.fc1.weight.shape(), &[config.mlp_hidden, config.flat_dim()])?;
        expect("fc2.weight", self.fc2.weight.shape(), &[2, config.mlp_hidden])?;
        match (&self.embeddings, config.operator.needs_embeddings()) {
            (Some(e), true) if e.dim() == config.embedding_dim => Ok(()),
            (Some(e), true) => Err(Error::dim(
                "ModelParams",
                format!("embedding dim {} but config expects {}", e.dim(), config.embedding_dim),
            )),
            (None, true) => Err(Error::Config(format!("operator {} needs embeddings", config.operator))),
            (_, false) => Ok(()),
        }
    }

    pub fn group(&self, g: ParamGroup) -> Option<&[f64]> {
        Some(match g {
            ParamGroup::Conv1Kernels => self.conv1.kernels.data(),
            ParamGroup::Conv1Bias => &self.conv1.bias,
            ParamGroup::Conv2Kernels => self.conv2.kernels.data(),
            ParamGroup::Conv2Bias => &self.conv2.bias,
            ParamGroup::Fc1Weight => self.fc1.weight.data(),
            ParamGroup::Fc1Bias => &self.fc1.bias,
            ParamGroup::Fc2Weight => self.fc2.weight.data(),
            ParamGroup::Fc2Bias => &self.fc2.bias,
            ParamGroup::Embeddings => return self.embeddings.as_ref().map(|e| e.as_tensor().data()),
        })
    }

    pub fn group_mut(&mut self, g: ParamGroup) -> Option<&mut [f64]> {
        Some(match g {
            ParamGroup::Conv1Kernels => self.conv1.kernels.data_mut(),
            ParamGroup::Conv1Bias => &mut self.conv1.bias,
            ParamGroup::Conv2Kernels => self.conv2.kernels.data_mut(),
            ParamGroup::Conv2Bias => &mut self.conv2.bias,
            ParamGroup::Fc1Weight => self.fc1.weight.data_mut(),
            ParamGroup::Fc1Bias => &mut self.fc1.bias,
            ParamGroup::Fc2Weight => self.fc2.weight.data_mut(),
            ParamGroup::Fc2Bias => &mut self.fc2.bias,
            ParamGroup::Embeddings => return self.embeddings.as_mut().map(|e| e.data_mut()),
        })
    }
}

/// Named parameter tensors, in checkpoint order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamGroup {
    Conv1Kernels,
    Conv1Bias,
    Conv2Kernels,
    Conv2Bias,
    Fc1Weight,
    Fc1Bias,
    Fc2Weight,
    Fc2Bias,
    Embeddings,
}

impl ParamGroup {
    pub const ALL: [ParamGroup; 9] = [
        ParamGroup::Conv1Kernels,
        ParamGroup::Conv1Bias,
        ParamGroup::Conv2Kernels,
        ParamGroup::Conv2Bias,
        ParamGroup::Fc1Weight,
        ParamGroup::Fc1Bias,
        ParamGroup::Fc2Weight,
        ParamGroup::Fc2Bias,
        ParamGroup::Embeddings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamGroup::Conv1Kernels => "conv1.kernels",
            ParamGroup::Conv1Bias => "conv1.bias",
            ParamGroup::Conv2Kernels => "conv2.kernels",
            ParamGroup::Conv2Bias => "conv2.bias",
            ParamGroup::Fc1Weight => "fc1.weight",
            ParamGroup::Fc1Bias => "fc1.bias",
            ParamGroup::Fc2Weight => "fc2.weight",
            ParamGroup::Fc2Bias => "fc2.bias",
            ParamGroup::Embeddings => "embeddings",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }
}

/// Gradients with the same layout as [`ModelParams`]; embedding gradients
/// are kept sparse by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub conv1: ConvLayerParams,
    pub conv2: ConvLayerParams,
    pub fc1: LinearLayerParams,
    pub fc2: LinearLayerParams,
    pub embeddings: RowGrads,
}

impl Gradients {
    pub fn zeros_like(params: &ModelParams) -> Self {
        let zc = |p: &ConvLayerParams| ConvLayerParams {
            kernels: Tensor::zeros(p.kernels.shape()),
            bias: vec![0.0; p.bias.len()],
        };
        let zl = |p: &LinearLayerParams| LinearLayerParams {
            weight: Tensor::zeros(p.weight.shape()),
            bias: vec![0.0; p.bias.len()],
        };
        Gradients {
            conv1: zc(&params.conv1),
            conv2: zc(&params.conv2),
            fc1: zl(&params.fc1),
            fc2: zl(&params.fc2),
            embeddings: RowGrads::new(),
        }
    }

    /// Dense slice for every group except [`ParamGroup::Embeddings`].
    pub fn group(&self, g: ParamGroup) -> Option<&[f64]> {
        Some(match g {
            ParamGroup::Conv1Kernels => self.conv1.kernels.data(),
            ParamGroup::Conv1Bias => &self.conv1.bias,
            ParamGroup::Conv2Kernels => self.conv2.kernels.data(),
            ParamGroup::Conv2Bias => &self.conv2.bias,
            ParamGroup::Fc1Weight => self.fc1.weight.data(),
            ParamGroup::Fc1Bias => &self.fc1.bias,
            ParamGroup::Fc2Weight => self.fc2.weight.data(),
            ParamGroup::Fc2Bias => &self.fc2.bias,
            ParamGroup::Embeddings => return None,
        })
    }

    fn dense_mut(&mut self) -> [&mut [f64]; 8] {
        [
            self.conv1.kernels.data_mut(),
            &mut self.conv1.bias,
            self.conv2.kernels.data_mut(),
            &mut self.conv2.bias,
            self.fc1.weight.data_mut(),
            &mut self.fc1.bias,
            self.fc2.weight.data_mut(),
            &mut self.fc2.bias,
        ]
    }

    /// Gradient of one flat coordinate of a group (zero for absent embedding rows).
    pub fn coordinate(&self, g: ParamGroup, index: usize, embedding_dim: usize) -> f64 {
        match g {
            ParamGroup::Embeddings => self
                .embeddings
                .get(&(index / embedding_dim))
                .map_or(0.0, |row| row[index % embedding_dim]),
            _ => self.group(g).map_or(0.0, |s| s[index]),
        }
    }

    /// `self += other`, element by element in a fixed order.
    pub fn accumulate(&mut self, other: &Gradients) {
        let src = [
            other.conv1.kernels.data(),
            &other.conv1.bias[..],
            other.conv2.kernels.data(),
            &other.conv2.bias[..],
            other.fc1.weight.data(),
            &other.fc1.bias[..],
            other.fc2.weight.data(),
            &other.fc2.bias[..],
        ];
        for (dst, src) in self.dense_mut().into_iter().zip(src) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
        for (id, row) in &other.embeddings {
            let dst = self.embeddings.entry(*id).or_insert_with(|| vec![0.0; row.len()]);
            for (d, s) in dst.iter_mut().zip(row) {
                *d += s;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for dst in self.dense_mut() {
            for d in dst {
                *d *= factor;
            }
        }
        for row in self.embeddings.values_mut() {
            for d in row {
                *d *= factor;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        ParamGroup::ALL[..8].iter().all(|&g| self.group(g).unwrap().iter().all(|v| v.is_finite()))
            && self.embeddings.values().all(|r| r.iter().all(|v| v.is_finite()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Intermediate values of one forward pass, consumed by [`backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub mode: Mode,
    pub a: Text,
    pub b: Text,
    pub matrix: Tensor,
    pub conv1_pre: Tensor,
    pub conv1_act: Tensor,
    pub pool1: Tensor,
    pub pool1_idx: PoolIndices,
    pub conv2_pre: Tensor,
    pub conv2_act: Tensor,
    pub pool2_idx: PoolIndices,
    pub flat: Vec<f64>,
    pub hidden_pre: Vec<f64>,
    pub hidden_act: Vec<f64>,
    pub dropout_mask: Vec<f64>,
    pub hidden_out: Vec<f64>,
    pub scores: [f64; 2],
}

pub fn forward<R: Rng + ?Sized>(
    pair: &TextPair,
    params: &ModelParams,
    config: &ModelConfig,
    mode: Mode,
    rng: &mut R,
) -> Result<([f64; 2], ForwardCache)> {
    forward_texts(&pair.a, &pair.b, params, config, mode, rng)
}

pub fn forward_texts<R: Rng + ?Sized>(
    a: &Text,
    b: &Text,
    params: &ModelParams,
    config: &ModelConfig,
    mode: Mode,
    rng: &mut R,
) -> Result<([f64; 2], ForwardCache)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Input("both texts must be non-empty".into()));
    }
    let matrix = matching_matrix(a, b, config.operator, params.embeddings.as_ref())?;
    let conv1_pre = conv2d_forward(&matrix, &params.conv1, config.padding)?;
    let conv1_act = relu_forward(&conv1_pre);
    let (_, h1, w1) = conv1_act.dims3("forward")?;
    let geom1 = dynamic_pool_geometry(h1, w1, config.pool_grid.0, config.pool_grid.1)?;
    let (pool1, pool1_idx) = max_pool_forward(&conv1_act, &geom1)?;
    let conv2_pre = conv2d_forward(&pool1, &params.conv2, config.padding)?;
    let conv2_act = relu_forward(&conv2_pre);
    let geom2 = PoolGeometry::fixed(config.fixed_pool.0, config.fixed_pool.1);
    let (pool2, pool2_idx) = max_pool_forward(&conv2_act, &geom2)?;
    let flat = pool2.into_data();
    let hidden_pre = linear_forward(&flat, &params.fc1)?;
    let mut hidden_act = hidden_pre.clone();
    relu_in_place(&mut hidden_act);
    let (hidden_out, dropout_mask) = dropout(&hidden_act, config.dropout_rate, mode == Mode::Train, rng)?;
    let s = linear_forward(&hidden_out, &params.fc2)?;
    let scores = [s[0], s[1]];
    let cache = ForwardCache {
        mode,
        a: a.clone(),
        b: b.clone(),
        matrix,
        conv1_pre,
        conv1_act,
        pool1,
        pool1_idx,
        conv2_pre,
        conv2_act,
        pool2_idx,
        flat,
        hidden_pre,
        hidden_act,
        dropout_mask,
        hidden_out,
        scores,
    };
    Ok((scores, cache))
}

/// Cross-entropy loss and parameter gradients for one example.
pub fn backward(cache: &ForwardCache, label: u8, params: &ModelParams, config: &ModelConfig) -> Result<(f64, Gradients)> {
    let out = softmax_cross_entropy(cache.scores, label);
    let grads = backward_from_scores(cache, out.grad, params, config)?;
    Ok((out.loss, grads))
}

/// Back-propagates an arbitrary upstream gradient on the two scores.
pub fn backward_from_scores(
    cache: &ForwardCache,
    grad_scores: [f64; 2],
    params: &ModelParams,
    config: &ModelConfig,
) -> Result<Gradients> {
    if cache.mode != Mode::Train {
        return Err(Error::Input("backward needs a cache from a train-mode forward pass".into()));
    }
    let (g_hidden_out, fc2) = linear_backward(&cache.hidden_out, &params.fc2, &grad_scores)?;
    let mut g_hidden = dropout_backward(&cache.dropout_mask, &g_hidden_out)?;
    for (g, &x) in g_hidden.iter_mut().zip(&cache.hidden_pre) {
        if x <= 0.0 {
            *g = 0.0;
        }
    }
    let (g_flat, fc1) = linear_backward(&cache.flat, &params.fc1, &g_hidden)?;
    let g_pool2 = Tensor::from_vec(cache.pool2_idx.output_shape(), g_flat)?;
    let g_conv2_act = max_pool_backward(&cache.pool2_idx, &g_pool2)?;
    let g_conv2_pre = relu_backward(&cache.conv2_pre, &g_conv2_act)?;
    let (g_pool1, conv2) = conv2d_backward(&cache.pool1, &params.conv2, config.padding, &g_conv2_pre)?;
    let g_conv1_act = max_pool_backward(&cache.pool1_idx, &g_pool1)?;
    let g_conv1_pre = relu_backward(&cache.conv1_pre, &g_conv1_act)?;
    let (g_matrix, conv1) = conv2d_backward(&cache.matrix, &params.conv1, config.padding, &g_conv1_pre)?;
    let embeddings = if config.operator.needs_embeddings() {
        matching_matrix_backward(&cache.a, &cache.b, config.operator, params.embeddings.as_ref(), &g_matrix)?
    } else {
        RowGrads::new()
    };
    Ok(Gradients { conv1, conv2, fc1, fc2, embeddings })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub class: u8,
    pub p1: f64,
}

/// Eval-mode class and positive probability. Ties go to the positive class.
pub fn predict(pair: &TextPair, params: &ModelParams, config: &ModelConfig) -> Result<Prediction> {
    predict_texts(&pair.a, &pair.b, params, config)
}

pub fn predict_texts(a: &Text, b: &Text, params: &ModelParams, config: &ModelConfig) -> Result<Prediction> {
    // Eval mode never draws from the generator.
    let mut rng = crate::rng::derive(0, &[]);
    let (scores, _) = forward_texts(a, b, params, config, Mode::Eval, &mut rng)?;
    let probs = softmax_cross_entropy(scores, 1).probs;
    Ok(Prediction { class: u8::from(probs[1] >= probs[0]), p1: probs[1] })
}

/// Eval-mode cross-entropy of one pair.
pub fn eval_loss(pair: &TextPair, params: &ModelParams, config: &ModelConfig) -> Result<f64> {
    let mut rng = crate::rng::derive(0, &[]);
    let (scores, _) = forward(pair, params, config, Mode::Eval, &mut rng)?;
    Ok(softmax_cross_entropy(scores, pair.label).loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::Vocabulary;

    fn pair(a: &str, b: &str, vocab: &Vocabulary) -> TextPair {
        use crate::data::tokenize;
        TextPair { a: Text::new(tokenize(a), vocab), b: Text::new(tokenize(b), vocab), label: 1 }
    }

    #[test]
    fn default_flat_dim_is_400() {
        assert_eq!(ModelConfig::default().flat_dim(), 16 * 5 * 5);
    }

    #[test]
    fn pool_geometry_examples() {
        assert_eq!(dynamic_pool_geometry(10, 10, 5, 5).unwrap().window_h, 2);
        assert_eq!(dynamic_pool_geometry(7, 7, 4, 4).unwrap().window_h, 2);
        assert_eq!(dynamic_pool_geometry(3, 3, 10, 10).unwrap().window_h, 1);
        assert!(dynamic_pool_geometry(0, 3, 10, 10).is_err());
    }

    #[test]
    fn zero_params_give_constant_scores() {
        let cfg = ModelConfig::default();
        let vocab = Vocabulary::from_tokens(vec!["<pad>".into(), "<unk>".into()]).unwrap();
        let params = ModelParams::zeros(&cfg, vocab.len()).unwrap();
        let mut rng = crate::rng::derive(1, &[]);
        let (s1, _) = forward(&pair("a b c", "a b", &vocab), &params, &cfg, Mode::Eval, &mut rng).unwrap();
        let (s2, _) = forward(&pair("x", "y z w v u t", &vocab), &params, &cfg, Mode::Eval, &mut rng).unwrap();
        assert_eq!(s1, s2);
        let p = predict(&pair("a", "b", &vocab), &params, &cfg).unwrap();
        assert_eq!(p.class, 1, "ties go to the positive class");
        assert_eq!(p.p1, 0.5);
    }

    #[test]
    fn eval_cache_cannot_backprop() {
        let cfg = ModelConfig::default();
        let vocab = Vocabulary::from_tokens(vec!["<pad>".into(), "<unk>".into()]).unwrap();
        let params = ModelParams::init(&cfg, vocab.len(), &mut crate::rng::derive(2, &[])).unwrap();
        let mut rng = crate::rng::derive(1, &[]);
        let (_, cache) = forward(&pair("a b", "a", &vocab), &params, &cfg, Mode::Eval, &mut rng).unwrap();
        assert!(backward(&cache, 1, &params, &cfg).is_err());
    }

    #[test]
    fn empty_text_rejected() {
        let cfg = ModelConfig::default();
        let vocab = Vocabulary::from_tokens(vec!["<pad>".into(), "<unk>".into()]).unwrap();
        let params = ModelParams::zeros(&cfg, vocab.len()).unwrap();
        let p = TextPair { a: Text::new(vec![], &vocab), b: Text::new(vec!["x".into()], &vocab), label: 0 };
        assert!(matches!(predict(&p, &params, &cfg), Err(Error::Input(_))));
    }

    #[test]
    fn config_pairs_round_trip() {
        let mut cfg = ModelConfig { operator: MatchOperator::DotProduct, dropout_rate: 0.25, ..Default::default() };
        cfg.pool_grid = (6, 7);
        let mut back = ModelConfig::default();
        for (k, v) in cfg.to_pairs() {
            assert!(back.set(&k, &v).unwrap());
        }
        assert_eq!(back, cfg);
        assert!(!back.set("learning_rate", "0.1").unwrap());
        assert!(back.set("kernel1", "five").is_err());
    }
}
