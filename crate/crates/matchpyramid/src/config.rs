//! Run configuration: built-in defaults, then a `key = value` file, then
//! `--set key=value` overrides, then dedicated flags. The fully resolved
//! result is written next to a command's outputs and can be fed back with
//! `--config` to repeat the run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use matchpyramid_core::model::ModelConfig;
use matchpyramid_core::train::TrainConfig;

use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MATCHPYRAMID_OUT";
pub const DEFAULT_OUT: &str = "runs";
pub const SNAPSHOT_FILE: &str = "config.resolved";

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; values may be empty.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected `key = value`, got {line:?}", n + 1))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(format!("line {}: empty key", n + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// Command-specific settings (paths, corpus sizes, ...), defaults filled in.
    pub extra: BTreeMap<String, String>,
    pub out_dir: PathBuf,
}

/// Where a [`RunConfig`] comes from, lowest precedence first.
#[derive(Debug, Clone, Default)]
pub struct Sources<'a> {
    pub file: Option<&'a Path>,
    pub sets: &'a [String],
    /// Dedicated flags, already in `key, value` form.
    pub flags: Vec<(&'static str, String)>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// `extras` lists the command's own keys with their defaults.
    pub fn resolve(command: &str, extras: &[(&str, &str)], src: Sources<'_>) -> CliResult<Self> {
        let mut cfg = RunConfig {
            command: command.to_string(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            extra: extras.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            out_dir: PathBuf::new(),
        };
        let mut out_setting: Option<String> = None;
        if let Some(path) = src.file {
            let text = crate::io::read_text(path)?;
            let pairs = parse_kv(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            for (k, v) in pairs {
                cfg.apply(&k, &v, &mut out_setting).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            }
        }
        for s in src.sets {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--set expects key=value, got {s:?}")))?;
            cfg.apply(k.trim(), v.trim(), &mut out_setting).map_err(|e| CliError::usage(format!("--set: {e}")))?;
        }
        for (k, v) in src.flags {
            cfg.apply(k, &v, &mut out_setting).map_err(|e| CliError::usage(format!("--{}: {e}", k.replace('_', "-"))))?;
        }
        cfg.out_dir = match (src.out, out_setting) {
            (Some(p), _) => p,
            (None, Some(s)) if !s.is_empty() => PathBuf::from(s),
            _ => std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from(DEFAULT_OUT), PathBuf::from),
        };
        cfg.model.validate()?;
        cfg.train.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str, out: &mut Option<String>) -> Result<(), String> {
        if key == "out" {
            *out = Some(value.to_string());
            return Ok(());
        }
        if self.model.set(key, value).map_err(|e| e.to_string())? || self.train.set(key, value).map_err(|e| e.to_string())? {
            return Ok(());
        }
        match self.extra.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(format!("unknown setting {key:?} for `{}`", self.command)),
        }
    }

    /// Raw value of a command-specific key; empty values count as unset.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.extra.get(key).map(String::as_str).filter(|v| !v.is_empty())
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn require_path(&self, key: &str) -> CliResult<PathBuf> {
        self.path(key).ok_or_else(|| {
            CliError::usage(format!("`{}` needs `{key}` (flag --{} or --set {key}=...)", self.command, key.replace('_', "-")))
        })
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> CliResult<T> {
        let raw = self.get(key).ok_or_else(|| CliError::usage(format!("setting {key:?} is unset")))?;
        raw.parse().map_err(|_| CliError::usage(format!("setting {key} = {raw:?} is not valid")))
    }

    /// `key = value` lines in a stable order: run, model, training, command settings.
    pub fn snapshot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# matchpyramid {}", self.command);
        let _ = writeln!(s, "out = {}", self.out_dir.display());
        for (k, v) in self.model.to_pairs().into_iter().chain(self.train.to_pairs()) {
            let _ = writeln!(s, "{k} = {v}");
        }
        for (k, v) in &self.extra {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn write_snapshot(&self) -> CliResult<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot create {}: {e}", self.out_dir.display())))?;
        let path = self.out_dir.join(SNAPSHOT_FILE);
        crate::io::write_file(&path, self.snapshot().as_bytes())?;
        Ok(path)
    }
}
