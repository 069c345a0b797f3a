use std::fmt::Write as _;

use matchpyramid_core::data::{split_dataset, RawPair};
use matchpyramid_core::synth::generate_citation_corpus;

use crate::config::{RunConfig, Sources};
use crate::error::CliResult;

pub const SPLIT: [f64; 3] = [5.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0];
pub const FILES: [&str; 3] = ["train.tsv", "valid.tsv", "test.tsv"];

pub fn keys() -> Vec<(&'static str, &'static str)> {
    vec![("n_pos", "2000"), ("neg_ratio", "2"), ("vocab_size", "400")]
}

pub fn resolve(src: Sources<'_>) -> CliResult<RunConfig> {
    RunConfig::resolve("gen-data", &keys(), src)
}

pub fn histogram(name: &str, pairs: &[RawPair]) -> String {
    let pos = pairs.iter().filter(|p| p.label == 1).count();
    format!("{name:<10} {:>6} pairs  label 0: {:>6}  label 1: {:>6}\n", pairs.len(), pairs.len() - pos, pos)
}

/// Writes `train.tsv`, `valid.tsv` and `test.tsv` (5:1:1) and prints the
/// label histogram of each.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    cfg.write_snapshot()?;
    let seed = cfg.train.seed;
    let corpus = generate_citation_corpus(cfg.parse("n_pos")?, cfg.parse("neg_ratio")?, cfg.parse("vocab_size")?, seed);
    let (train, valid, test) = split_dataset(&corpus, SPLIT, seed)?;
    let mut report = histogram("all", &corpus);
    for (name, part) in FILES.iter().zip([&train, &valid, &test]) {
        crate::io::write_pairs_tsv(&cfg.out_dir.join(name), part)?;
        let _ = write!(report, "{}", histogram(name, part));
    }
    print!("{report}");
    Ok(())
}
