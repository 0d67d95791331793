use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sparse::SparseVector;
use crate::text::stopwords::StopWordList;
use crate::text::tokenize::tokenize;

/// Ordered list of terms; a term's position is its feature index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Fails if a term repeats.
    pub fn from_terms(terms: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::CorruptManifest(format!("duplicate vocabulary term `{t}`")));
            }
        }
        Ok(Vocabulary { terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

/// Top `limit` non-stop-word terms by collection frequency (total count
/// over all docs). Order: descending count, ties lexicographic ascending.
pub fn build_tf_vocabulary<S: AsRef<str>>(docs: &[S], limit: usize, stops: &StopWordList) -> Vocabulary {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for doc in docs {
        for tok in tokenize(doc.as_ref()) {
            if !stops.contains(&tok) {
                *counts.entry(tok).or_insert(0) += 1;
            }
        }
    }
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|(ta, ca), (tb, cb)| cb.cmp(ca).then_with(|| ta.cmp(tb)));
    ranked.truncate(limit);
    Vocabulary::from_terms(ranked.into_iter().map(|(t, _)| t).collect()).expect("terms are unique keys")
}

/// Raw term counts of `text` over `vocab`; out-of-vocabulary tokens are
/// ignored.
pub fn tf_vector(vocab: &Vocabulary, text: &str) -> SparseVector {
    let pairs = tokenize(text).into_iter().filter_map(|t| vocab.index_of(&t)).map(|i| (i, 1.0));
    SparseVector::from_pairs(vocab.len(), pairs).expect("vocabulary indices are in range")
}
