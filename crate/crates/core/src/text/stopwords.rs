use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

const ENGLISH: &str = include_str!("../../data/stopwords_en.txt");

/// Negation terms that stay in the vocabulary; they are never stop words
/// in the bundled list.
pub const NEGATION_TERMS: [&str; 9] =
    ["no", "not", "nor", "never", "none", "nothing", "nowhere", "neither", "cannot"];

/// A set of lowercase terms excluded from vocabularies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWordList {
    terms: BTreeSet<String>,
}

impl StopWordList {
    /// The bundled English list (`data/stopwords_en.txt`).
    pub fn english() -> Self {
        Self::parse(ENGLISH)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// One term per line; `#` starts a comment, blank lines are skipped.
    /// Terms are lowercased.
    pub fn parse(text: &str) -> Self {
        let terms = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
        StopWordList { terms }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for StopWordList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StopWordList {
            terms: iter.into_iter().map(|s| s.into().to_lowercase()).collect(),
        }
    }
}
