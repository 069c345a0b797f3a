use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use matchpyramid_core::data::{tokenize, Text};
use matchpyramid_core::matching::matching_matrix;
use matchpyramid_core::model::{forward_texts, Mode, ModelParams};
use matchpyramid_core::rng::derive;
use matchpyramid_core::vocab::Vocabulary;
use matchpyramid_core::Tensor;

use crate::config::{RunConfig, Sources};
use crate::error::{CliError, CliResult};
use crate::pgm::{scale, to_p2, ValueRange};

pub const MANIFEST_FILE: &str = "manifest.tsv";
pub const MATRIX_FILE: &str = "matrix.pgm";

pub fn keys() -> Vec<(&'static str, &'static str)> {
    vec![("checkpoint", ""), ("text_a", ""), ("text_b", "")]
}

pub fn resolve(src: Sources<'_>) -> CliResult<RunConfig> {
    RunConfig::resolve("visualize", &keys(), src)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exported {
    pub file: PathBuf,
    pub width: usize,
    pub height: usize,
    pub range: ValueRange,
}

/// Writes P2 images plus a manifest of their value ranges into a directory.
pub struct Exporter<'a> {
    dir: &'a Path,
    pub written: Vec<Exported>,
}

impl<'a> Exporter<'a> {
    pub fn new(dir: &'a Path) -> Self {
        Exporter { dir, written: Vec::new() }
    }

    pub fn image(&mut self, name: &str, values: &[f64], height: usize, width: usize) -> CliResult<()> {
        let (img, range) = scale(values, width, height);
        let file = self.dir.join(name);
        crate::io::write_file(&file, to_p2(&img).as_bytes())?;
        self.written.push(Exported { file, width, height, range });
        Ok(())
    }

    /// One image per channel of a `[C, H, W]` tensor: `{prefix}_{c}.pgm`.
    pub fn channels(&mut self, prefix: &str, t: &Tensor) -> CliResult<()> {
        let (c, h, w) = t.dims3("export")?;
        for k in 0..c {
            self.image(&format!("{prefix}_{k}.pgm"), t.channel(k), h, w)?;
        }
        Ok(())
    }

    pub fn manifest(&self, header: &str) -> String {
        let mut s = String::from(header);
        s.push_str("file\twidth\theight\tmin\tmax\tnote\n");
        for e in &self.written {
            let name = e.file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let note = if e.range.is_degenerate() { "degenerate range: uniform mid-gray" } else { "min-max scaled to 0-255" };
            let _ = writeln!(s, "{name}\t{}\t{}\t{:?}\t{:?}\t{note}", e.width, e.height, e.range.min, e.range.max);
        }
        s
    }
}

fn side(s: &str, vocab: &Vocabulary, which: &str) -> CliResult<Text> {
    let toks = tokenize(s);
    if toks.is_empty() {
        return Err(CliError::usage(format!("{which} has no tokens")));
    }
    Ok(Text::new(toks, vocab))
}

/// Returns every image written, in export order.
pub fn run(cfg: &mut RunConfig) -> CliResult<Vec<Exported>> {
    let ckpt = match cfg.path("checkpoint") {
        Some(p) => {
            let c = crate::io::load_checkpoint(&p)?;
            super::reconcile_model(cfg, &c.config, &p)?;
            Some(c)
        }
        None => None,
    };
    if ckpt.is_none() && cfg.model.operator.needs_embeddings() {
        return Err(CliError::usage(format!(
            "the {} operator needs trained embeddings; pass --checkpoint or use operator ind",
            cfg.model.operator
        )));
    }
    let (a_str, b_str) = match (cfg.get("text_a"), cfg.get("text_b")) {
        (Some(a), Some(b)) => (a.to_string(), b.to_string()),
        _ => return Err(CliError::usage("visualize needs --text-a and --text-b")),
    };
    cfg.write_snapshot()?;
    let empty = Vocabulary::from_tokens(vec!["<pad>".into(), "<unk>".into()])?;
    let vocab = ckpt.as_ref().map_or(&empty, |c| &c.vocab);
    let (a, b) = (side(&a_str, vocab, "text_a")?, side(&b_str, vocab, "text_b")?);

    let mut ex = Exporter::new(&cfg.out_dir);
    match &ckpt {
        None => {
            let m = matching_matrix(&a, &b, cfg.model.operator, None)?;
            ex.image(MATRIX_FILE, m.data(), a.len(), b.len())?;
        }
        Some(c) => export_network(&mut ex, &a, &b, &c.params, cfg)?,
    }
    let header = format!("# rows: {}\n# cols: {}\n", a.tokens.join(" "), b.tokens.join(" "));
    crate::io::write_file(&cfg.out_dir.join(MANIFEST_FILE), ex.manifest(&header).as_bytes())?;
    Ok(ex.written)
}

fn export_network(ex: &mut Exporter<'_>, a: &Text, b: &Text, params: &ModelParams, cfg: &RunConfig) -> CliResult<()> {
    let (_, cache) = forward_texts(a, b, params, &cfg.model, Mode::Eval, &mut derive(0, &[]))?;
    ex.image(MATRIX_FILE, cache.matrix.data(), a.len(), b.len())?;
    let k1 = &params.conv1.kernels;
    let r1 = params.conv1.kernel_size();
    for k in 0..params.conv1.out_maps() {
        ex.image(&format!("conv1_kernel_{k}.pgm"), &k1.data()[k * r1 * r1..(k + 1) * r1 * r1], r1, r1)?;
    }
    let k2 = &params.conv2.kernels;
    let r2 = params.conv2.kernel_size();
    let c_in = params.conv2.in_maps();
    for k in 0..params.conv2.out_maps() {
        for c in 0..c_in {
            let at = (k * c_in + c) * r2 * r2;
            ex.image(&format!("conv2_kernel_{k}_{c}.pgm"), &k2.data()[at..at + r2 * r2], r2, r2)?;
        }
    }
    ex.channels("conv1_map", &cache.conv1_act)?;
    ex.channels("pool1_map", &cache.pool1)?;
    ex.channels("conv2_map", &cache.conv2_act)?;
    Ok(())
}
