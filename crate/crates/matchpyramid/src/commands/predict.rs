use std::fmt::Write as _;

use matchpyramid_core::data::{tokenize, truncate, Text};
use matchpyramid_core::model::predict_texts;
use matchpyramid_core::train::predict_all;

use crate::config::{RunConfig, Sources};
use crate::error::{CliError, CliResult};

pub fn keys() -> Vec<(&'static str, &'static str)> {
    let mut k = vec![("checkpoint", ""), ("data", ""), ("text_a", ""), ("text_b", "")];
    k.extend(super::DATA_KEYS);
    k
}

pub fn resolve(src: Sources<'_>) -> CliResult<RunConfig> {
    RunConfig::resolve("predict", &keys(), src)
}

/// Prints `prediction<TAB>p1` for a single pair, or one
/// `index<TAB>prediction<TAB>p1` line per pair of a data file (which is
/// also written to `predictions.tsv`).
pub fn run(cfg: &mut RunConfig) -> CliResult<()> {
    let ckpt_path = cfg.require_path("checkpoint")?;
    let ckpt = crate::io::load_checkpoint(&ckpt_path)?;
    super::reconcile_model(cfg, &ckpt.config, &ckpt_path)?;
    cfg.write_snapshot()?;

    match (cfg.get("text_a"), cfg.get("text_b"), cfg.path("data")) {
        (Some(a), Some(b), None) => {
            let side = |s: &str| -> CliResult<Text> {
                let mut toks = tokenize(s);
                if let Some(n) = super::max_len(cfg)? {
                    toks = truncate(&toks, n);
                }
                if toks.is_empty() {
                    return Err(CliError::usage(format!("text {s:?} has no tokens")));
                }
                Ok(Text::new(toks, &ckpt.vocab))
            };
            let p = predict_texts(&side(a)?, &side(b)?, &ckpt.params, &cfg.model)?;
            println!("{}\t{:.6}", p.class, p.p1);
        }
        (None, None, Some(_)) => {
            let raw = super::load(cfg, "data")?;
            let data = super::encode(cfg, &raw, &ckpt.vocab, "data")?;
            let preds = predict_all(&data.pairs, &ckpt.params, &cfg.model, cfg.train.workers)?;
            let mut tsv = String::from("index\tprediction\tp1\n");
            for (i, p) in preds.iter().enumerate() {
                let _ = writeln!(tsv, "{i}\t{}\t{:?}", p.class, p.p1);
            }
            crate::io::write_file(&cfg.out_dir.join(super::eval::PREDICTIONS_FILE), tsv.as_bytes())?;
            print!("{tsv}");
        }
        _ => return Err(CliError::usage("predict needs either --data or both --text-a and --text-b")),
    }
    Ok(())
}
