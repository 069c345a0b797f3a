//! One module per subcommand. Each resolves its [`RunConfig`], writes the
//! snapshot first, then does its work.

pub mod eval;
pub mod gen_data;
pub mod predict;
pub mod train;
pub mod visualize;

use std::path::Path;

use matchpyramid_core::data::{tokenize, PairDataset, Provenance, RawPair, TsvSchema};
use matchpyramid_core::model::ModelConfig;
use matchpyramid_core::vocab::Vocabulary;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Shared data keys and their defaults.
pub const DATA_KEYS: [(&str, &str); 2] = [("format", "generic"), ("max_len", "")];

pub(crate) fn schema(cfg: &RunConfig) -> CliResult<TsvSchema> {
    crate::io::schema_by_name(cfg.get("format").unwrap_or("generic"))
}

pub(crate) fn max_len(cfg: &RunConfig) -> CliResult<Option<usize>> {
    match cfg.get("max_len") {
        None => Ok(None),
        Some(_) => {
            let n: usize = cfg.parse("max_len")?;
            if n == 0 {
                return Err(CliError::usage("max_len must be at least 1 (leave it empty for no limit)"));
            }
            Ok(Some(n))
        }
    }
}

pub(crate) fn provenance(cfg: &RunConfig) -> Provenance {
    match cfg.get("format") {
        Some("msrp") => Provenance::Msrp,
        _ => Provenance::Custom,
    }
}

pub(crate) fn load(cfg: &RunConfig, key: &str) -> CliResult<Vec<RawPair>> {
    crate::io::load_pairs_tsv(&cfg.require_path(key)?, &schema(cfg)?)
}

pub(crate) fn build_vocab(pairs: &[RawPair], min_count: usize) -> CliResult<Vocabulary> {
    let docs: Vec<Vec<String>> = pairs.iter().flat_map(|p| [tokenize(&p.text_a), tokenize(&p.text_b)]).collect();
    Ok(Vocabulary::build(docs.iter().map(Vec::as_slice), min_count)?)
}

pub(crate) fn encode(cfg: &RunConfig, raw: &[RawPair], vocab: &Vocabulary, path_key: &str) -> CliResult<PairDataset> {
    PairDataset::encode(raw, vocab, max_len(cfg)?, provenance(cfg)).map_err(|e| {
        let path = cfg.get(path_key).unwrap_or(path_key);
        CliError::usage(format!("{path}: {e}"))
    })
}

/// Model settings for commands that read a checkpoint: the checkpoint's own,
/// unless the run configuration explicitly asks for something else.
pub(crate) fn reconcile_model(cfg: &mut RunConfig, stored: &ModelConfig, checkpoint: &Path) -> CliResult<()> {
    let defaults = ModelConfig::default().to_pairs();
    let stored_pairs = stored.to_pairs();
    for ((key, requested), ((_, default), (_, have))) in cfg.model.to_pairs().into_iter().zip(defaults.into_iter().zip(stored_pairs)) {
        if requested != default && requested != have {
            return Err(CliError::usage(format!(
                "{} was trained with {key} = {have}, but the run configuration sets {key} = {requested}",
                checkpoint.display()
            )));
        }
    }
    cfg.model = stored.clone();
    Ok(())
}
