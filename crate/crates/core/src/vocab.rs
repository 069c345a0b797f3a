//! Token/id mapping with reserved padding and unknown-token ids.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

pub const PAD: usize = 0;
pub const UNK: usize = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    ids: BTreeMap<String, usize>,
    tokens: Vec<String>,
}

impl Vocabulary {
    /// Assigns ids to tokens seen at least `min_count` times, most frequent
    /// first and lexicographic among equal counts. Ids 0 and 1 are PAD and UNK.
    pub fn build<'a, I, S>(corpus: I, min_count: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        if min_count == 0 {
            return Err(Error::Config("min_count must be at least 1".into()));
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for seq in corpus {
            for tok in seq {
                *counts.entry(tok.as_ref()).or_default() += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::Input("cannot build a vocabulary from an empty corpus".into()));
        }
        let mut kept: Vec<(&str, usize)> = counts
            .into_iter()
            .filter(|&(tok, n)| n >= min_count && tok != PAD_TOKEN && tok != UNK_TOKEN)
            .collect();
        // BTreeMap order is lexicographic; the stable sort keeps it within equal counts.
        kept.sort_by_key(|&(_, n)| core::cmp::Reverse(n));
        let mut tokens = Vec::with_capacity(kept.len() + 2);
        tokens.push(PAD_TOKEN.to_string());
        tokens.push(UNK_TOKEN.to_string());
        tokens.extend(kept.into_iter().map(|(t, _)| t.to_string()));
        Ok(Self::from_tokens(tokens).expect("specials are unique"))
    }

    /// Rebuilds a vocabulary from its id-ordered token list (PAD and UNK first).
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < 2 || tokens[PAD] != PAD_TOKEN || tokens[UNK] != UNK_TOKEN {
            return Err(Error::Input("vocabulary must start with the PAD and UNK entries".into()));
        }
        let mut ids = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate().skip(2) {
            if ids.insert(t.clone(), i).is_some() || t == PAD_TOKEN || t == UNK_TOKEN {
                return Err(Error::Input(format!("duplicate vocabulary entry {t:?}")));
            }
        }
        Ok(Vocabulary { ids, tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, token: &str) -> usize {
        self.ids.get(token).copied().unwrap_or(UNK)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens.iter().map(|t| self.id(t.as_ref())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn corpus() -> Vec<Vec<String>> {
        vec![vec!["a".into(), "a".into(), "b".into()]]
    }

    #[test]
    fn min_count_one_keeps_everything() {
        let c = corpus();
        let v = Vocabulary::build(c.iter().map(Vec::as_slice), 1).unwrap();
        assert_eq!(v.tokens(), &["<pad>", "<unk>", "a", "b"]);
    }

    #[test]
    fn min_count_two_maps_rare_to_unk() {
        let c = corpus();
        let v = Vocabulary::build(c.iter().map(Vec::as_slice), 2).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v.id("a"), 2);
        assert_eq!(v.id("b"), UNK);
    }

    #[test]
    fn frequency_then_lexicographic_order() {
        let c: Vec<Vec<String>> = vec!["z y y x x w".split(' ').map(String::from).collect()];
        let v = Vocabulary::build(c.iter().map(Vec::as_slice), 1).unwrap();
        assert_eq!(&v.tokens()[2..], &["x", "y", "w", "z"]);
        let again = Vocabulary::build(c.iter().map(Vec::as_slice), 1).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let c: Vec<Vec<String>> = vec![vec![]];
        assert!(Vocabulary::build(c.iter().map(Vec::as_slice), 1).is_err());
        assert!(Vocabulary::build(core::iter::empty::<&[String]>(), 1).is_err());
    }

    #[test]
    fn from_tokens_round_trips() {
        let c = corpus();
        let v = Vocabulary::build(c.iter().map(Vec::as_slice), 1).unwrap();
        assert_eq!(Vocabulary::from_tokens(v.tokens().to_vec()).unwrap(), v);
        assert!(Vocabulary::from_tokens(vec!["a".into()]).is_err());
    }
}
