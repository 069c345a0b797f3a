use std::fmt::Write as _;

use matchpyramid_core::baselines::{all_positive_predict, classify, select_threshold, TfIdfModel};
use matchpyramid_core::data::RawPair;
use matchpyramid_core::data::tokenize;
use matchpyramid_core::metrics::{accuracy_f1, MetricsReport};
use matchpyramid_core::train::predict_all;
use serde::Serialize;

use crate::config::{RunConfig, Sources};
use crate::error::{CliError, CliResult};

pub const METRICS_FILE: &str = "metrics.jsonl";
pub const PREDICTIONS_FILE: &str = "predictions.tsv";

pub fn keys() -> Vec<(&'static str, &'static str)> {
    let mut k = vec![("checkpoint", ""), ("data", ""), ("baselines", "false"), ("baseline_train", "")];
    k.extend(super::DATA_KEYS);
    k
}

pub fn resolve(src: Sources<'_>) -> CliResult<RunConfig> {
    RunConfig::resolve("eval", &keys(), src)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsLine {
    pub model: String,
    pub accuracy: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl MetricsLine {
    pub fn new(model: impl Into<String>, m: &MetricsReport) -> Self {
        MetricsLine {
            model: model.into(),
            accuracy: m.accuracy,
            f1: m.f1,
            precision: m.precision,
            recall: m.recall,
            tp: m.tp,
            fp: m.fp,
            tn: m.tn,
            fn_: m.fn_,
            threshold: m.threshold,
        }
    }
}

pub fn table(rows: &[MetricsLine]) -> String {
    let mut s = format!("{:<12} {:>7} {:>7} {:>9} {:>7} {:>6}\n", "model", "acc", "f1", "precision", "recall", "n");
    for r in rows {
        let n = r.tp + r.fp + r.tn + r.fn_;
        let _ = writeln!(s, "{:<12} {:>7.2} {:>7.2} {:>9.2} {:>7.2} {:>6}", r.model, r.accuracy, r.f1, r.precision, r.recall, n);
    }
    s
}

/// Tf-Idf with idf fitted on both sides of the training pairs and the
/// decision threshold chosen on training scores.
pub fn tfidf_baseline(train: &[RawPair], test: &[RawPair]) -> CliResult<MetricsReport> {
    let tok = |ps: &[RawPair]| -> Vec<(Vec<String>, Vec<String>, u8)> {
        ps.iter().map(|p| (tokenize(&p.text_a), tokenize(&p.text_b), p.label)).collect()
    };
    let (tr, te) = (tok(train), tok(test));
    let model = TfIdfModel::fit(tr.iter().flat_map(|(a, b, _)| [a.as_slice(), b.as_slice()]))?;
    let scores = |ps: &[(Vec<String>, Vec<String>, u8)]| ps.iter().map(|(a, b, _)| model.score(a, b)).collect::<Vec<_>>();
    let labels = |ps: &[(Vec<String>, Vec<String>, u8)]| ps.iter().map(|p| p.2).collect::<Vec<_>>();
    let t = select_threshold(&scores(&tr), &labels(&tr))?;
    let mut report = accuracy_f1(&classify(&scores(&te), t), &labels(&te))?;
    report.threshold = Some(t);
    Ok(report)
}

pub fn all_positive_baseline(test: &[RawPair]) -> CliResult<MetricsReport> {
    let labels: Vec<u8> = test.iter().map(|p| p.label).collect();
    Ok(accuracy_f1(&all_positive_predict(labels.len()), &labels)?)
}

pub fn model_label(op: matchpyramid_core::matching::MatchOperator) -> String {
    use matchpyramid_core::matching::MatchOperator::*;
    match op {
        Indicator => "MP-Ind",
        Cosine => "MP-Cos",
        DotProduct => "MP-Dot",
    }
    .to_string()
}

pub fn run(cfg: &mut RunConfig) -> CliResult<()> {
    let ckpt_path = cfg.require_path("checkpoint")?;
    let ckpt = crate::io::load_checkpoint(&ckpt_path)?;
    super::reconcile_model(cfg, &ckpt.config, &ckpt_path)?;
    cfg.write_snapshot()?;

    let raw = super::load(cfg, "data")?;
    let data = super::encode(cfg, &raw, &ckpt.vocab, "data")?;
    let preds = predict_all(&data.pairs, &ckpt.params, &cfg.model, cfg.train.workers)?;
    let classes: Vec<u8> = preds.iter().map(|p| p.class).collect();
    let labels = data.labels();
    let mut rows = vec![MetricsLine::new(model_label(cfg.model.operator), &accuracy_f1(&classes, &labels)?)];

    let mut tsv = String::from("index\tlabel\tprediction\tp1\n");
    for (i, (p, y)) in preds.iter().zip(&labels).enumerate() {
        let _ = writeln!(tsv, "{i}\t{y}\t{}\t{:?}", p.class, p.p1);
    }
    crate::io::write_file(&cfg.out_dir.join(PREDICTIONS_FILE), tsv.as_bytes())?;

    let baselines: bool = cfg.parse("baselines")?;
    if baselines {
        rows.push(MetricsLine::new("AllPositive", &all_positive_baseline(&raw)?));
        let train_path = cfg.require_path("baseline_train").map_err(|_| {
            CliError::usage("--baselines needs the training file for Tf-Idf (--baseline-train)")
        })?;
        let train = crate::io::load_pairs_tsv(&train_path, &super::schema(cfg)?)?;
        rows.push(MetricsLine::new("Tf-Idf", &tfidf_baseline(&train, &raw)?));
    }

    let jsonl: String = rows.iter().map(|r| serde_json::to_string(r).expect("plain record serializes") + "\n").collect();
    crate::io::write_file(&cfg.out_dir.join(METRICS_FILE), jsonl.as_bytes())?;
    print!("{}", table(&rows));
    Ok(())
}
