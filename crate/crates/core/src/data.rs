//! Text pairs: tokenization, TSV parsing, encoding against a vocabulary,
//! splitting, and the canonical line-based dataset dump.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::rng::derive;
use crate::vocab::Vocabulary;
use crate::{Error, Result};

/// Maximum text length used for citation-style abstracts.
pub const CITATION_MAX_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPair {
    pub text_a: String,
    pub text_b: String,
    pub label: u8,
}

/// One side of a pair: surface tokens plus their vocabulary ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    pub tokens: Vec<String>,
    pub ids: Vec<usize>,
}

impl Text {
    pub fn new(tokens: Vec<String>, vocab: &Vocabulary) -> Self {
        let ids = vocab.encode(&tokens);
        Text { tokens, ids }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextPair {
    pub a: Text,
    pub b: Text,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Msrp,
    CitationSynthetic,
    Custom,
}

/// Encoded pairs. Ids refer to the vocabulary the dataset was encoded with.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    pub pairs: Vec<TextPair>,
    pub provenance: Provenance,
}

impl PairDataset {
    /// Tokenizes, optionally truncates, and encodes every pair. Fails on the
    /// first pair with an empty side.
    pub fn encode(raw: &[RawPair], vocab: &Vocabulary, max_len: Option<usize>, provenance: Provenance) -> Result<Self> {
        let prep = |s: &str| {
            let t = tokenize(s);
            match max_len {
                Some(n) => truncate(&t, n),
                None => t,
            }
        };
        let mut pairs = Vec::with_capacity(raw.len());
        for (i, r) in raw.iter().enumerate() {
            let a = prep(&r.text_a);
            let b = prep(&r.text_b);
            if a.is_empty() || b.is_empty() {
                return Err(Error::Input(format!("pair {i} has an empty text after tokenization")));
            }
            pairs.push(TextPair { a: Text::new(a, vocab), b: Text::new(b, vocab), label: r.label });
        }
        Ok(PairDataset { pairs, provenance })
    }

    pub fn validate(&self, vocab: &Vocabulary) -> Result<()> {
        for (i, p) in self.pairs.iter().enumerate() {
            if p.label > 1 {
                return Err(Error::Input(format!("pair {i}: label {} is not binary", p.label)));
            }
            for t in [&p.a, &p.b] {
                if t.is_empty() || t.ids.len() != t.tokens.len() {
                    return Err(Error::Input(format!("pair {i}: empty or misaligned text")));
                }
                if t.ids.iter().any(|&id| id >= vocab.len()) {
                    return Err(Error::Input(format!("pair {i}: id outside the vocabulary")));
                }
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<u8> {
        self.pairs.iter().map(|p| p.label).collect()
    }
}

/// Lowercases, splits on whitespace, and strips leading/trailing ASCII
/// punctuation from each token. Tokens that become empty are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

pub fn truncate<S: Clone>(tokens: &[S], max_len: usize) -> Vec<S> {
    tokens[..tokens.len().min(max_len)].to_vec()
}

/// Column layout of a pair TSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TsvSchema {
    pub label_col: usize,
    pub text_a_col: usize,
    pub text_b_col: usize,
    pub has_header: bool,
}

impl TsvSchema {
    /// `Quality  #1 ID  #2 ID  #1 String  #2 String`, with a header line.
    pub const MSRP: TsvSchema = TsvSchema { label_col: 0, text_a_col: 3, text_b_col: 4, has_header: true };
    /// `label  text_a  text_b`, with a header line.
    pub const GENERIC: TsvSchema = TsvSchema { label_col: 0, text_a_col: 1, text_b_col: 2, has_header: true };

    fn columns(&self) -> usize {
        self.label_col.max(self.text_a_col).max(self.text_b_col) + 1
    }

    pub fn validate(&self) -> Result<()> {
        let c = [self.label_col, self.text_a_col, self.text_b_col];
        if c[0] == c[1] || c[0] == c[2] || c[1] == c[2] {
            return Err(Error::Config(format!("schema columns must be distinct, got {c:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineErrorKind {
    MissingColumns { expected: usize, found: usize },
    BadLabel(String),
    NotUtf8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based line number in the file.
    pub line: usize,
    pub kind: LineErrorKind,
}

impl core::fmt::Display for LineError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.kind {
            LineErrorKind::MissingColumns { expected, found } => {
                write!(f, "line {}: expected at least {expected} tab-separated columns, found {found}", self.line)
            }
            LineErrorKind::BadLabel(l) => write!(f, "line {}: label {l:?} is not 0 or 1", self.line),
            LineErrorKind::NotUtf8 => write!(f, "line {}: not valid UTF-8", self.line),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub pairs: Vec<RawPair>,
    pub errors: Vec<LineError>,
}

/// Parses pair TSV content. Bad lines are reported, not fatal. Fields are
/// split on raw tabs; quotes carry no meaning (MSRP sentences contain them).
pub fn parse_pairs_tsv(content: &[u8], schema: &TsvSchema) -> Result<LoadReport> {
    schema.validate()?;
    let content = content.strip_prefix("\u{feff}".as_bytes()).unwrap_or(content);
    let mut report = LoadReport::default();
    let need = schema.columns();
    for (idx, raw_line) in content.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        if schema.has_header && idx == 0 {
            continue;
        }
        let raw_line = raw_line.strip_suffix(b"\r").unwrap_or(raw_line);
        if raw_line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let Ok(line) = core::str::from_utf8(raw_line) else {
            report.errors.push(LineError { line: line_no, kind: LineErrorKind::NotUtf8 });
            continue;
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < need {
            report.errors.push(LineError {
                line: line_no,
                kind: LineErrorKind::MissingColumns { expected: need, found: cols.len() },
            });
            continue;
        }
        let label = match cols[schema.label_col].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                report.errors.push(LineError { line: line_no, kind: LineErrorKind::BadLabel(other.to_string()) });
                continue;
            }
        };
        report.pairs.push(RawPair {
            text_a: cols[schema.text_a_col].to_string(),
            text_b: cols[schema.text_b_col].to_string(),
            label,
        });
    }
    Ok(report)
}

/// Generic-schema TSV (header + `label\ttext_a\ttext_b` lines).
pub fn write_pairs_tsv(pairs: &[RawPair]) -> String {
    let mut out = String::from("label\ttext_a\ttext_b\n");
    for p in pairs {
        out.push_str(&format!("{}\t{}\t{}\n", p.label, p.text_a, p.text_b));
    }
    out
}

/// Canonical dump: one `label TAB tokens_a TAB tokens_b` line per pair,
/// tokens space-joined.
pub fn dump_dataset(pairs: &[TextPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(&format!("{}\t{}\t{}\n", p.label, p.a.tokens.join(" "), p.b.tokens.join(" ")));
    }
    out
}

/// Seeded shuffle then cut into train / valid / test by `fractions`.
pub fn split_dataset<T: Clone>(items: &[T], fractions: [f64; 3], seed: u64) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 || fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::Config(format!("split fractions must be in [0, 1] and sum to 1, got {fractions:?}")));
    }
    let n = items.len();
    let n_train = libm::round(fractions[0] * n as f64) as usize;
    let n_valid = (libm::round(fractions[1] * n as f64) as usize).min(n - n_train.min(n));
    let n_train = n_train.min(n);
    if n_train == 0 || n_valid == 0 || n_train + n_valid >= n {
        return Err(Error::Config(format!(
            "split of {n} items by {fractions:?} leaves an empty part"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut derive(seed, &[crate::rng::stream::SPLIT]));
    let pick = |r: &[usize]| r.iter().map(|&i| items[i].clone()).collect::<Vec<T>>();
    Ok((pick(&order[..n_train]), pick(&order[n_train..n_train + n_valid]), pick(&order[n_train + n_valid..])))
}

/// Seeded two-way split: `fraction` of the items (rounded, at least one)
/// held out, the rest kept.
pub fn holdout<T: Clone>(items: &[T], fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!("holdout fraction must be in (0, 1), got {fraction}")));
    }
    let n = items.len();
    let n_out = (libm::round(fraction * n as f64) as usize).max(1);
    if n_out >= n {
        return Err(Error::Config(format!("holding out {fraction} of {n} items leaves nothing to keep")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut derive(seed, &[crate::rng::stream::SPLIT, 2]));
    let pick = |r: &[usize]| r.iter().map(|&i| items[i].clone()).collect::<Vec<T>>();
    Ok((pick(&order[n_out..]), pick(&order[..n_out])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Down the ages!"), ["down", "the", "ages"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("  ... !! ").is_empty());
        assert_eq!(tokenize("\"U.S.\" co-op, (1998)"), ["u.s", "co-op", "1998"]);
    }

    #[test]
    fn truncate_cases() {
        let t: Vec<usize> = (0..40).collect();
        assert_eq!(truncate(&t, 32), (0..32).collect::<Vec<_>>());
        assert_eq!(truncate(&t[..5], 32), t[..5].to_vec());
        assert_eq!(truncate(&t, 1), vec![0]);
    }

    #[test]
    fn three_lines_one_malformed() {
        let content = b"label\ta\tb\n1\thello there\tgeneral\n0\tonly two\n0\tx\ty\n";
        let r = parse_pairs_tsv(content, &TsvSchema::GENERIC).unwrap();
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.errors, [LineError { line: 3, kind: LineErrorKind::MissingColumns { expected: 3, found: 2 } }]);
    }

    #[test]
    fn msrp_layout_with_bom_and_quotes() {
        let content = "\u{feff}Quality\t#1 ID\t#2 ID\t#1 String\t#2 String\r\n\
                       1\t702876\t702977\tHe said \"no\".\tHe refused.\r\n\
                       2\t1\t2\ta\tb\r\n";
        let r = parse_pairs_tsv(content.as_bytes(), &TsvSchema::MSRP).unwrap();
        assert_eq!(r.pairs, [RawPair { text_a: "He said \"no\".".into(), text_b: "He refused.".into(), label: 1 }]);
        assert_eq!(r.errors[0].kind, LineErrorKind::BadLabel("2".into()));
    }

    #[test]
    fn invalid_utf8_is_reported() {
        let content = b"label\ta\tb\n1\t\xff\tb\n";
        let r = parse_pairs_tsv(content, &TsvSchema::GENERIC).unwrap();
        assert_eq!(r.errors[0], LineError { line: 2, kind: LineErrorKind::NotUtf8 });
    }

    #[test]
    fn holdout_partitions() {
        let items: Vec<u32> = (0..20).collect();
        let (keep, out) = holdout(&items, 0.1, 3).unwrap();
        assert_eq!((keep.len(), out.len()), (18, 2));
        let mut all: Vec<u32> = keep.into_iter().chain(out).collect();
        all.sort_unstable();
        assert_eq!(all, items);
        assert!(holdout(&items[..1], 0.5, 0).is_err());
    }

    #[test]
    fn split_seven() {
        let items: Vec<u32> = (0..7).collect();
        let (a, b, c) = split_dataset(&items, [5.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0], 3).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (5, 1, 1));
        let mut all: Vec<u32> = a.iter().chain(&b).chain(&c).copied().collect();
        all.sort();
        assert_eq!(all, items);
        assert_eq!(split_dataset(&items, [5.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0], 3).unwrap(), (a, b, c));
    }

    #[test]
    fn split_rejects_bad_fractions() {
        let items: Vec<u32> = (0..7).collect();
        assert!(split_dataset(&items, [0.5, 0.2, 0.2], 0).is_err());
        assert!(split_dataset(&items[..2], [0.8, 0.1, 0.1], 0).is_err());
    }

    #[test]
    fn encode_rejects_empty_side() {
        let vocab = Vocabulary::from_tokens(vec!["<pad>".into(), "<unk>".into()]).unwrap();
        let raw = [RawPair { text_a: "ok".into(), text_b: "!!".into(), label: 0 }];
        assert!(PairDataset::encode(&raw, &vocab, None, Provenance::Custom).is_err());
    }
}
