use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::sparse::SparseVector;
use crate::text::stopwords::StopWordList;
use crate::text::tokenize::tokenize;
use crate::text::vocab::{build_tf_vocabulary, Vocabulary};

/// Vocabulary plus smoothed inverse document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    vocab: Vocabulary,
    idf: Vec<f64>,
    corpus_doc_count: usize,
}

impl TfIdfModel {
    /// Rebuilds a model from stored parts; every idf must be finite and
    /// at least 1.
    pub fn from_parts(vocab: Vocabulary, idf: Vec<f64>, corpus_doc_count: usize) -> Result<Self> {
        if idf.len() != vocab.len() {
            return Err(Error::DimensionMismatch { expected: vocab.len(), found: idf.len() });
        }
        if let Some(bad) = idf.iter().find(|w| !(w.is_finite() && **w >= 1.0)) {
            return Err(Error::CorruptManifest(format!("idf value {bad} is below 1 or not finite")));
        }
        Ok(TfIdfModel { vocab, idf, corpus_doc_count })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn corpus_doc_count(&self) -> usize {
        self.corpus_doc_count
    }
}

/// Fits the vocabulary as [`build_tf_vocabulary`] does, then sets
/// `idf[t] = ln((1 + n) / (1 + df(t))) + 1` with `n = docs.len()`.
pub fn build_tfidf_model<S: AsRef<str>>(docs: &[S], limit: usize, stops: &StopWordList) -> TfIdfModel {
    let vocab = build_tf_vocabulary(docs, limit, stops);
    let mut df = vec![0u64; vocab.len()];
    for doc in docs {
        let present: HashSet<usize> = tokenize(doc.as_ref()).iter().filter_map(|t| vocab.index_of(t)).collect();
        for i in present {
            df[i] += 1;
        }
    }
    let n = docs.len() as f64;
    let idf = df.iter().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect();
    TfIdfModel { vocab, idf, corpus_doc_count: docs.len() }
}

/// Count times idf per term, scaled to unit L2 norm. An all-zero vector
/// stays zero.
pub fn tfidf_vector(model: &TfIdfModel, text: &str) -> SparseVector {
    let pairs = tokenize(text).into_iter().filter_map(|t| model.vocab.index_of(&t)).map(|i| (i, 1.0));
    let counts = SparseVector::from_pairs(model.vocab.len(), pairs).expect("vocabulary indices are in range");
    let weighted = SparseVector::from_pairs(
        counts.dim(),
        counts.entries().iter().map(|&(i, c)| (i, c * model.idf[i])),
    )
    .expect("same support");
    let norm = weighted.norm();
    if norm == 0.0 {
        weighted
    } else {
        weighted.scaled(1.0 / norm)
    }
}

/// Cosine similarity clamped to [-1, 1]; 0 when either vector is zero.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> Result<f64> {
    let dot = a.dot(b)?;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}
