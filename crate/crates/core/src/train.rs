//! Mini-batch Adagrad training with early stopping on validation accuracy.
//!
//! Per-example gradients may be computed on several threads (`std`
//! feature), but they are always summed in example order, and every
//! example's dropout mask comes from a generator keyed by (seed, epoch,
//! position). The result is bit-identical for any worker count.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::data::TextPair;
use crate::metrics::{accuracy_f1, MetricsReport};
use crate::model::{backward, forward, predict, Gradients, Mode, ModelConfig, ModelParams, Prediction};
use crate::optim::AdagradState;
use crate::rng::{derive, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adagrad_epsilon: f64,
    pub max_epochs: usize,
    /// Epochs without a new best validation accuracy before stopping.
    pub patience: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            learning_rate: 0.05,
            adagrad_epsilon: 1e-8,
            max_epochs: 30,
            patience: 5,
            seed: 0,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.patience == 0 || self.max_epochs == 0 || self.workers == 0 {
            return Err(Error::Config("batch_size, patience, max_epochs and workers must be at least 1".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate must be finite and >= 0, got {}", self.learning_rate)));
        }
        if self.adagrad_epsilon.is_nan() || self.adagrad_epsilon < 0.0 {
            return Err(Error::Config("adagrad_epsilon must be >= 0".into()));
        }
        Ok(())
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        [
            ("batch_size", self.batch_size.to_string()),
            ("learning_rate", format!("{:?}", self.learning_rate)),
            ("adagrad_epsilon", format!("{:?}", self.adagrad_epsilon)),
            ("max_epochs", self.max_epochs.to_string()),
            ("patience", self.patience.to_string()),
            ("seed", self.seed.to_string()),
            ("workers", self.workers.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// Applies one setting; `Ok(false)` for keys that are not training settings.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn num<T: core::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
        }
        match key {
            "batch_size" => self.batch_size = num(key, value)?,
            "learning_rate" => self.learning_rate = num(key, value)?,
            "adagrad_epsilon" => self.adagrad_epsilon = num(key, value)?,
            "max_epochs" => self.max_epochs = num(key, value)?,
            "patience" => self.patience = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Mean per-example cross-entropy over the epoch.
    pub train_loss: f64,
    /// Percent.
    pub val_accuracy: f64,
    /// Percent.
    pub val_f1: f64,
    /// Wall time of the epoch; always 0 without the `std` feature.
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
}

impl TrainHistory {
    /// Index of the first record with the highest validation accuracy.
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, r) in self.records.iter().enumerate() {
            if best.is_none_or(|b| r.val_accuracy > self.records[b].val_accuracy) {
                best = Some(i);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EarlyStop {
    Continue,
    Stop,
}

/// Stop once `patience` epochs have passed since the best validation accuracy.
pub fn early_stop_check(history: &TrainHistory, patience: usize) -> EarlyStop {
    match history.best_index() {
        Some(best) if history.records.len() - 1 - best >= patience => EarlyStop::Stop,
        _ => EarlyStop::Continue,
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters after the epoch with the best validation accuracy.
    pub params: ModelParams,
    pub history: TrainHistory,
    /// 1-based epoch the returned parameters come from.
    pub best_epoch: usize,
}

/// Runs `f(0..n)` on up to `workers` threads; results come back in index order.
pub fn par_map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    #[cfg(feature = "std")]
    if workers > 1 && n > 1 {
        let chunk = n.div_ceil(workers.min(n));
        return std::thread::scope(|s| {
            let f = &f;
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .map(|start| s.spawn(move || (start..(start + chunk).min(n)).map(f).collect::<Vec<T>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        });
    }
    let _ = workers;
    (0..n).map(f).collect()
}

pub fn predict_all(pairs: &[TextPair], params: &ModelParams, config: &ModelConfig, workers: usize) -> Result<Vec<Prediction>> {
    par_map(pairs.len(), workers, |i| predict(&pairs[i], params, config)).into_iter().collect()
}

pub fn evaluate(pairs: &[TextPair], params: &ModelParams, config: &ModelConfig, workers: usize) -> Result<MetricsReport> {
    let preds: Vec<u8> = predict_all(pairs, params, config, workers)?.iter().map(|p| p.class).collect();
    let labels: Vec<u8> = pairs.iter().map(|p| p.label).collect();
    accuracy_f1(&preds, &labels)
}

/// Trains from freshly initialized parameters (seeded by `train_config.seed`).
pub fn train(
    train_set: &[TextPair],
    valid_set: &[TextPair],
    model_config: &ModelConfig,
    train_config: &TrainConfig,
    vocab_size: usize,
) -> Result<TrainOutcome> {
    let init = ModelParams::init(model_config, vocab_size, &mut derive(train_config.seed, &[stream::INIT]))?;
    train_from(init, train_set, valid_set, model_config, train_config, &mut |_| {})
}

struct Stopwatch {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Stopwatch {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    fn seconds(&self) -> f64 {
        #[cfg(feature = "std")]
        return self.start.elapsed().as_secs_f64();
        #[cfg(not(feature = "std"))]
        0.0
    }
}

/// Trains `init`, calling `on_epoch` after every epoch.
pub fn train_from(
    init: ModelParams,
    train_set: &[TextPair],
    valid_set: &[TextPair],
    model_config: &ModelConfig,
    train_config: &TrainConfig,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    train_config.validate()?;
    init.check_config(model_config)?;
    if train_set.is_empty() || valid_set.is_empty() {
        return Err(Error::Input("training and validation sets must be non-empty".into()));
    }
    let tc = train_config;
    let mut params = init;
    let mut adagrad = AdagradState::new(&params);
    let mut history = TrainHistory::default();
    let mut best = params.clone();
    let mut best_epoch = 0;
    let mut best_acc = f64::NEG_INFINITY;
    let n = train_set.len();

    for epoch in 1..=tc.max_epochs {
        let clock = Stopwatch::start();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut derive(tc.seed, &[stream::SHUFFLE, epoch as u64]));
        let mut loss_sum = 0.0;
        for (b, batch) in order.chunks(tc.batch_size).enumerate() {
            let shared = &params;
            let results = par_map(batch.len(), tc.workers, |k| {
                let pair = &train_set[batch[k]];
                let position = (b * tc.batch_size + k) as u64;
                let mut rng = derive(tc.seed, &[stream::DROPOUT, epoch as u64, position]);
                let (_, cache) = forward(pair, shared, model_config, Mode::Train, &mut rng)?;
                backward(&cache, pair.label, shared, model_config)
            });
            let mut total = Gradients::zeros_like(&params);
            let mut batch_loss = 0.0;
            for r in results {
                let (loss, g) = r?;
                if !loss.is_finite() || !g.is_finite() {
                    return Err(Error::Divergence { epoch, batch: b, loss });
                }
                batch_loss += loss;
                total.accumulate(&g);
            }
            total.scale(1.0 / batch.len() as f64);
            adagrad.step(&mut params, &total, tc.learning_rate, tc.adagrad_epsilon);
            loss_sum += batch_loss;
        }
        let val = evaluate(valid_set, &params, model_config, tc.workers)?;
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / n as f64,
            val_accuracy: val.accuracy,
            val_f1: val.f1,
            seconds: clock.seconds(),
        };
        history.records.push(record);
        on_epoch(&record);
        if val.accuracy > best_acc {
            best_acc = val.accuracy;
            best = params.clone();
            best_epoch = epoch;
        }
        // Nothing can beat a perfect score.
        if best_acc >= 100.0 || early_stop_check(&history, tc.patience) == EarlyStop::Stop {
            break;
        }
    }
    Ok(TrainOutcome { params: best, history, best_epoch })
}
