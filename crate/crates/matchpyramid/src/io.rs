//! Filesystem access for datasets and checkpoints. Unreadable inputs are
//! usage errors that name the path; failed writes are runtime errors.

use std::path::Path;

use anyhow::Context;
use matchpyramid_core::checkpoint::{self, Checkpoint};
use matchpyramid_core::data::{self, LoadReport, RawPair, TsvSchema};
use matchpyramid_core::model::{ModelConfig, ModelParams};
use matchpyramid_core::vocab::Vocabulary;

use crate::error::{CliError, CliResult};

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read_bytes(path)?).map_err(|_| CliError::usage(format!("{} is not valid UTF-8", path.display())))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn schema_by_name(name: &str) -> CliResult<TsvSchema> {
    match name {
        "generic" => Ok(TsvSchema::GENERIC),
        "msrp" => Ok(TsvSchema::MSRP),
        other => Err(CliError::usage(format!("unknown data format {other:?} (expected generic or msrp)"))),
    }
}

/// Loads a pair TSV. Malformed lines are reported on stderr and skipped; a
/// file without a single valid pair is rejected.
pub fn load_pairs_tsv(path: &Path, schema: &TsvSchema) -> CliResult<Vec<RawPair>> {
    let report = load_pairs_report(path, schema)?;
    for e in &report.errors {
        eprintln!("warning: {}: {e}", path.display());
    }
    if report.pairs.is_empty() {
        return Err(CliError::usage(format!("{} contains no valid pairs", path.display())));
    }
    Ok(report.pairs)
}

pub fn load_pairs_report(path: &Path, schema: &TsvSchema) -> CliResult<LoadReport> {
    let bytes = read_bytes(path)?;
    data::parse_pairs_tsv(&bytes, schema).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn write_pairs_tsv(path: &Path, pairs: &[RawPair]) -> CliResult<()> {
    write_file(path, data::write_pairs_tsv(pairs).as_bytes())
}

pub fn save_checkpoint(path: &Path, params: &ModelParams, config: &ModelConfig, vocab: &Vocabulary) -> CliResult<()> {
    write_file(path, &checkpoint::encode(params, config, vocab))
}

pub fn load_checkpoint(path: &Path) -> CliResult<Checkpoint> {
    let bytes = read_bytes(path)?;
    checkpoint::decode(&bytes).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}
