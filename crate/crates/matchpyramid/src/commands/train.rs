use std::fs::File;
use std::io::{BufWriter, Write};

use matchpyramid_core::data::holdout;
use matchpyramid_core::model::ModelParams;
use matchpyramid_core::rng::{derive, stream};
use matchpyramid_core::train::{train_from, EpochRecord};
use serde::Serialize;

use crate::config::{RunConfig, Sources};
use crate::error::{CliError, CliResult};

pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const HISTORY_FILE: &str = "history.jsonl";

pub fn keys() -> Vec<(&'static str, &'static str)> {
    let mut k = vec![("train", ""), ("valid", ""), ("valid_fraction", "0.1"), ("min_count", "1")];
    k.extend(super::DATA_KEYS);
    k
}

pub fn resolve(src: Sources<'_>) -> CliResult<RunConfig> {
    RunConfig::resolve("train", &keys(), src)
}

#[derive(Serialize)]
struct HistoryLine {
    epoch: usize,
    train_loss: f64,
    val_accuracy: f64,
    val_f1: f64,
    seconds: f64,
}

impl From<&EpochRecord> for HistoryLine {
    fn from(r: &EpochRecord) -> Self {
        HistoryLine {
            epoch: r.epoch,
            train_loss: r.train_loss,
            val_accuracy: r.val_accuracy,
            val_f1: r.val_f1,
            seconds: r.seconds,
        }
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    cfg.write_snapshot()?;
    let raw = super::load(cfg, "train")?;
    let (train_raw, valid_raw) = match cfg.path("valid") {
        Some(_) => (raw, super::load(cfg, "valid")?),
        None => holdout(&raw, cfg.parse("valid_fraction")?, cfg.train.seed)?,
    };
    let vocab = super::build_vocab(&train_raw, cfg.parse("min_count")?)?;
    let train_set = super::encode(cfg, &train_raw, &vocab, "train")?;
    let valid_set = super::encode(cfg, &valid_raw, &vocab, "valid")?;
    eprintln!(
        "training {} on {} pairs, validating on {} (vocabulary {})",
        cfg.model.operator,
        train_set.pairs.len(),
        valid_set.pairs.len(),
        vocab.len()
    );

    let log_path = cfg.out_dir.join(HISTORY_FILE);
    let mut log = BufWriter::new(
        File::create(&log_path).map_err(|e| anyhow::anyhow!("cannot create {}: {e}", log_path.display()))?,
    );
    let mut log_error = None;
    let init = ModelParams::init(&cfg.model, vocab.len(), &mut derive(cfg.train.seed, &[stream::INIT]))?;
    let outcome = train_from(init, &train_set.pairs, &valid_set.pairs, &cfg.model, &cfg.train, &mut |r| {
        eprintln!(
            "epoch {:>3}  loss {:.5}  val acc {:6.2}  f1 {:6.2}  ({:.1}s)",
            r.epoch, r.train_loss, r.val_accuracy, r.val_f1, r.seconds
        );
        let line = serde_json::to_string(&HistoryLine::from(r)).expect("plain record serializes");
        if let Err(e) = writeln!(log, "{line}").and_then(|_| log.flush()) {
            log_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = log_error {
        return Err(CliError::Runtime(anyhow::anyhow!("cannot write {}: {e}", log_path.display())));
    }

    let ckpt = cfg.out_dir.join(CHECKPOINT_FILE);
    crate::io::save_checkpoint(&ckpt, &outcome.params, &cfg.model, &vocab)?;
    let best = &outcome.history.records[outcome.best_epoch - 1];
    println!(
        "best epoch {} of {}: validation accuracy {:.2}, F1 {:.2}",
        outcome.best_epoch,
        outcome.history.records.len(),
        best.val_accuracy,
        best.val_f1
    );
    println!("checkpoint: {}", ckpt.display());
    Ok(())
}
