//! Binary checkpoint codec.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      8 bytes  "MPYRCKPT"
//! version    u32
//! config     u32 byte length, then UTF-8 "key = value\n" lines
//! vocabulary u32 entry count, then per entry: u32 length + UTF-8 bytes
//! tensors    u32 count, then per tensor:
//!              u32 name length + name, u32 ndim, ndim x u64 dims,
//!              prod(dims) x f64
//! ```

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::embedding::EmbeddingTable;
use crate::layers::{ConvLayerParams, LinearLayerParams};
use crate::model::{ModelConfig, ModelParams, ParamGroup};
use crate::vocab::Vocabulary;
use crate::{Error, Result, Tensor};

pub const MAGIC: &[u8; 8] = b"MPYRCKPT";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: ModelConfig,
    pub vocab: Vocabulary,
    pub params: ModelParams,
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&u32::try_from(v).expect("length fits in u32").to_le_bytes());
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len());
    out.extend_from_slice(s.as_bytes());
}

fn tensor_shape(params: &ModelParams, g: ParamGroup) -> Option<Vec<usize>> {
    Some(match g {
        ParamGroup::Conv1Kernels => params.conv1.kernels.shape().to_vec(),
        ParamGroup::Conv2Kernels => params.conv2.kernels.shape().to_vec(),
        ParamGroup::Fc1Weight => params.fc1.weight.shape().to_vec(),
        ParamGroup::Fc2Weight => params.fc2.weight.shape().to_vec(),
        ParamGroup::Embeddings => params.embeddings.as_ref()?.as_tensor().shape().to_vec(),
        _ => alloc::vec![params.group(g)?.len()],
    })
}

pub fn encode(params: &ModelParams, config: &ModelConfig, vocab: &Vocabulary) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let cfg: String = config.to_pairs().iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    put_str(&mut out, &cfg);
    put_u32(&mut out, vocab.len());
    for t in vocab.tokens() {
        put_str(&mut out, t);
    }
    let groups: Vec<ParamGroup> = ParamGroup::ALL.into_iter().filter(|&g| params.group(g).is_some()).collect();
    put_u32(&mut out, groups.len());
    for g in groups {
        let shape = tensor_shape(params, g).expect("present group");
        put_str(&mut out, g.name());
        put_u32(&mut out, shape.len());
        for d in shape {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in params.group(g).expect("present group") {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, detail: impl Into<String>) -> Error {
        Error::Checkpoint { offset: self.pos, detail: detail.into() }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(self.err(format!("truncated while reading {what}: need {n} bytes, {} left", self.buf.len() - self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()) as usize)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        let b = self.take(8, what)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let n = self.u32(what)?;
        let start = self.pos;
        let b = self.take(n, what)?;
        core::str::from_utf8(b)
            .map(ToString::to_string)
            .map_err(|_| Error::Checkpoint { offset: start, detail: format!("{what} is not UTF-8") })
    }
}

/// Parses a checkpoint. Nothing is returned unless the whole buffer is valid.
pub fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8, "magic")? != MAGIC {
        return Err(Error::Checkpoint { offset: 0, detail: "bad magic; not a checkpoint file".into() });
    }
    let version = r.u32("version")?;
    if version != VERSION as usize {
        return Err(Error::Checkpoint {
            offset: 8,
            detail: format!("unsupported checkpoint version {version} (this build reads version {VERSION})"),
        });
    }
    let cfg_start = r.pos;
    let cfg_text = r.string("config block")?;
    let mut config = ModelConfig::default();
    for line in cfg_text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Checkpoint { offset: cfg_start, detail: format!("config line {line:?} has no '='") })?;
        let known = config
            .set(k.trim(), v.trim())
            .map_err(|e| Error::Checkpoint { offset: cfg_start, detail: e.to_string() })?;
        if !known {
            return Err(Error::Checkpoint { offset: cfg_start, detail: format!("unknown config key {:?}", k.trim()) });
        }
    }
    let n_vocab = r.u32("vocabulary size")?;
    let mut tokens = Vec::with_capacity(n_vocab.min(1 << 20));
    for _ in 0..n_vocab {
        tokens.push(r.string("vocabulary entry")?);
    }
    let vocab_end = r.pos;
    let vocab = Vocabulary::from_tokens(tokens).map_err(|e| Error::Checkpoint { offset: vocab_end, detail: e.to_string() })?;
    let n_tensors = r.u32("tensor count")?;
    let mut tensors: Vec<(ParamGroup, Tensor)> = Vec::new();
    for _ in 0..n_tensors {
        let name_at = r.pos;
        let name = r.string("tensor name")?;
        let group = ParamGroup::from_name(&name)
            .ok_or_else(|| Error::Checkpoint { offset: name_at, detail: format!("unknown tensor {name:?}") })?;
        if tensors.iter().any(|(g, _)| *g == group) {
            return Err(Error::Checkpoint { offset: name_at, detail: format!("duplicate tensor {name:?}") });
        }
        let ndim = r.u32("tensor rank")?;
        let mut shape = Vec::with_capacity(ndim.min(8));
        for _ in 0..ndim {
            shape.push(r.u64("tensor dimension")? as usize);
        }
        let len = shape.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).ok_or_else(|| r.err("tensor size overflows"))?;
        let raw = r.take(len.checked_mul(8).ok_or_else(|| r.err("tensor size overflows"))?, "tensor data")?;
        let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        tensors.push((group, Tensor::from_vec(&shape, data)?));
    }
    if r.pos != bytes.len() {
        return Err(r.err(format!("{} trailing bytes after the last tensor", bytes.len() - r.pos)));
    }
    let end = r.pos;
    let mut take = |g: ParamGroup| -> Result<Tensor> {
        let i = tensors
            .iter()
            .position(|(k, _)| *k == g)
            .ok_or_else(|| Error::Checkpoint { offset: end, detail: format!("missing tensor {:?}", g.name()) })?;
        Ok(tensors.swap_remove(i).1)
    };
    let bad = |e: Error| Error::Checkpoint { offset: end, detail: e.to_string() };
    let conv1 = ConvLayerParams::from_parts(take(ParamGroup::Conv1Kernels)?, take(ParamGroup::Conv1Bias)?.into_data()).map_err(bad)?;
    let conv2 = ConvLayerParams::from_parts(take(ParamGroup::Conv2Kernels)?, take(ParamGroup::Conv2Bias)?.into_data()).map_err(bad)?;
    let fc1 = LinearLayerParams::from_parts(take(ParamGroup::Fc1Weight)?, take(ParamGroup::Fc1Bias)?.into_data()).map_err(bad)?;
    let fc2 = LinearLayerParams::from_parts(take(ParamGroup::Fc2Weight)?, take(ParamGroup::Fc2Bias)?.into_data()).map_err(bad)?;
    let embeddings = if config.operator.needs_embeddings() {
        Some(EmbeddingTable::from_tensor(take(ParamGroup::Embeddings)?).map_err(bad)?)
    } else {
        None
    };
    if !tensors.is_empty() {
        return Err(Error::Checkpoint { offset: end, detail: format!("unexpected tensor {:?}", tensors[0].0.name()) });
    }
    let params = ModelParams { conv1, conv2, fc1, fc2, embeddings };
    params.check_config(&config).map_err(bad)?;
    if let Some(e) = &params.embeddings {
        if e.vocab_size() != vocab.len() {
            return Err(bad(Error::Config(format!(
                "embedding table has {} rows for a vocabulary of {}",
                e.vocab_size(),
                vocab.len()
            ))));
        }
    }
    Ok(Checkpoint { config, vocab, params })
}
