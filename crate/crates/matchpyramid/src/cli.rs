use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::Sources;
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "matchpyramid", version, about = "Text matching as image recognition: train, evaluate and inspect MatchPyramid models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Settings file with `key = value` lines
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override a setting; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
    /// Output directory [default: $MATCHPYRAMID_OUT, else ./runs]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Threads for per-example work; results do not depend on it
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Column layout: generic (label, text_a, text_b) or msrp
    #[arg(long, value_name = "FORMAT")]
    pub format: Option<String>,
    /// Truncate every text to this many tokens
    #[arg(long)]
    pub max_len: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model; writes model.ckpt, history.jsonl and config.resolved
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "TSV")]
        train: Option<PathBuf>,
        /// Validation pairs; without it a seeded fraction of --train is held out
        #[arg(long, value_name = "TSV")]
        valid: Option<PathBuf>,
        /// Matching operator: ind, cos or dot
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Evaluate a checkpoint, optionally next to the AllPositive and Tf-Idf baselines
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data_args: DataArgs,
        #[arg(long, value_name = "FILE")]
        checkpoint: Option<PathBuf>,
        #[arg(long, value_name = "TSV")]
        data: Option<PathBuf>,
        /// Also report AllPositive and Tf-Idf
        #[arg(long)]
        baselines: bool,
        /// Training pairs for fitting Tf-Idf
        #[arg(long, value_name = "TSV")]
        baseline_train: Option<PathBuf>,
    },
    /// Predict the class of one pair or of every pair in a file
    Predict {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data_args: DataArgs,
        #[arg(long, value_name = "FILE")]
        checkpoint: Option<PathBuf>,
        #[arg(long, value_name = "TSV")]
        data: Option<PathBuf>,
        #[arg(long)]
        text_a: Option<String>,
        #[arg(long)]
        text_b: Option<String>,
    },
    /// Export matching matrix, kernels and feature maps as P2 graymaps
    Visualize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "FILE")]
        checkpoint: Option<PathBuf>,
        /// Matching operator when no checkpoint is given
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        text_a: Option<String>,
        #[arg(long)]
        text_b: Option<String>,
    },
    /// Generate a synthetic citation-style corpus split 5:1:1
    GenData {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_pos: Option<usize>,
        #[arg(long)]
        neg_ratio: Option<usize>,
        /// Number of topic words
        #[arg(long)]
        vocab_size: Option<usize>,
    },
}

type Flags = Vec<(&'static str, String)>;

fn push<T: ToString>(flags: &mut Flags, key: &'static str, v: &Option<T>) {
    if let Some(v) = v {
        flags.push((key, v.to_string()));
    }
}

fn path(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn sources<'a>(common: &'a Common, mut flags: Flags) -> Sources<'a> {
    push(&mut flags, "seed", &common.seed);
    push(&mut flags, "workers", &common.workers);
    Sources { file: common.config.as_deref(), sets: &common.sets, flags, out: common.out.clone() }
}

fn data_flags(d: &DataArgs) -> Flags {
    let mut f = Flags::new();
    push(&mut f, "format", &d.format);
    push(&mut f, "max_len", &d.max_len);
    f
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train { common, data, train, valid, operator, epochs } => {
            let mut f = data_flags(&data);
            push(&mut f, "train", &path(&train));
            push(&mut f, "valid", &path(&valid));
            push(&mut f, "operator", &operator);
            push(&mut f, "max_epochs", &epochs);
            commands::train::run(&commands::train::resolve(sources(&common, f))?)
        }
        Command::Eval { common, data_args, checkpoint, data, baselines, baseline_train } => {
            let mut f = data_flags(&data_args);
            push(&mut f, "checkpoint", &path(&checkpoint));
            push(&mut f, "data", &path(&data));
            push(&mut f, "baseline_train", &path(&baseline_train));
            if baselines {
                f.push(("baselines", "true".into()));
            }
            commands::eval::run(&mut commands::eval::resolve(sources(&common, f))?)
        }
        Command::Predict { common, data_args, checkpoint, data, text_a, text_b } => {
            let mut f = data_flags(&data_args);
            push(&mut f, "checkpoint", &path(&checkpoint));
            push(&mut f, "data", &path(&data));
            push(&mut f, "text_a", &text_a);
            push(&mut f, "text_b", &text_b);
            commands::predict::run(&mut commands::predict::resolve(sources(&common, f))?)
        }
        Command::Visualize { common, checkpoint, operator, text_a, text_b } => {
            let mut f = Flags::new();
            push(&mut f, "checkpoint", &path(&checkpoint));
            push(&mut f, "operator", &operator);
            push(&mut f, "text_a", &text_a);
            push(&mut f, "text_b", &text_b);
            let mut cfg = commands::visualize::resolve(sources(&common, f))?;
            let written = commands::visualize::run(&mut cfg)?;
            println!("wrote {} images to {}", written.len(), cfg.out_dir.display());
            Ok(())
        }
        Command::GenData { common, n_pos, neg_ratio, vocab_size } => {
            let mut f = Flags::new();
            push(&mut f, "n_pos", &n_pos);
            push(&mut f, "neg_ratio", &neg_ratio);
            push(&mut f, "vocab_size", &vocab_size);
            commands::gen_data::run(&commands::gen_data::resolve(sources(&common, f))?)
        }
    }
}
