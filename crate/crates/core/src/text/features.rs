use std::collections::BTreeMap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::corpus::Dataset;
use crate::sparse::SparseVector;
use crate::text::stopwords::StopWordList;
use crate::text::tfidf::{build_tfidf_model, cosine, tfidf_vector, TfIdfModel};
use crate::text::vocab::{build_tf_vocabulary, tf_vector, Vocabulary};

/// Model input for one headline/body pair.
///
/// With `k = |tf_vocab|` the layout is `[0, k)` headline term counts,
/// `[k, 2k)` body term counts, and index `2k` the TF-IDF cosine
/// similarity of headline and body. Dimension is `2k + 1`.
pub type FeatureVector = SparseVector;

pub fn feature_dim(tf_vocab_len: usize) -> usize {
    2 * tf_vocab_len + 1
}

pub fn assemble_features(headline: &str, body: &str, tf_vocab: &Vocabulary, tfidf: &TfIdfModel) -> FeatureVector {
    let body_part = BodyPart::new(body, tf_vocab, tfidf);
    combine(headline, &body_part, tf_vocab, tfidf)
}

struct BodyPart {
    tf: SparseVector,
    tfidf: SparseVector,
}

impl BodyPart {
    fn new(body: &str, tf_vocab: &Vocabulary, tfidf: &TfIdfModel) -> Self {
        BodyPart { tf: tf_vector(tf_vocab, body), tfidf: tfidf_vector(tfidf, body) }
    }
}

fn combine(headline: &str, body: &BodyPart, tf_vocab: &Vocabulary, tfidf: &TfIdfModel) -> FeatureVector {
    let head_tfidf = tfidf_vector(tfidf, headline);
    let sim = cosine(&head_tfidf, &body.tfidf).expect("both vectors share the tf-idf vocabulary");
    let sim = SparseVector::from_dense(&[sim.clamp(0.0, 1.0)]);
    tf_vector(tf_vocab, headline).concat(&body.tf).concat(&sim)
}

/// The two fitted vocabularies that turn text pairs into feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureExtractor {
    pub tf_vocab: Vocabulary,
    pub tfidf: TfIdfModel,
}

impl FeatureExtractor {
    /// TF vocabulary from the deduplicated texts of `train` only; TF-IDF
    /// model from `tfidf_corpus`.
    pub fn fit(train: &Dataset, tfidf_corpus: &[String], lim_unigram: usize, stops: &StopWordList) -> Self {
        let train_texts = train.unique_texts();
        FeatureExtractor {
            tf_vocab: build_tf_vocabulary(&train_texts, lim_unigram, stops),
            tfidf: build_tfidf_model(tfidf_corpus, lim_unigram, stops),
        }
    }

    pub fn input_dim(&self) -> usize {
        feature_dim(self.tf_vocab.len())
    }

    pub fn features(&self, headline: &str, body: &str) -> FeatureVector {
        assemble_features(headline, body, &self.tf_vocab, &self.tfidf)
    }

    /// Features for every instance in order. Body vectors are computed
    /// once per body id. The dataset must be valid.
    pub fn featurize(&self, dataset: &Dataset) -> Vec<FeatureVector> {
        let bodies: Vec<(&u64, &str)> = dataset.bodies.iter().map(|(id, b)| (id, b.text.as_str())).collect();
        let make_body = |&(id, text): &(&u64, &str)| (*id, BodyPart::new(text, &self.tf_vocab, &self.tfidf));
        #[cfg(feature = "parallel")]
        let cache: BTreeMap<u64, BodyPart> = bodies.par_iter().map(make_body).collect();
        #[cfg(not(feature = "parallel"))]
        let cache: BTreeMap<u64, BodyPart> = bodies.iter().map(make_body).collect();

        let make = |inst: &crate::corpus::Instance| combine(&inst.headline, &cache[&inst.body_id], &self.tf_vocab, &self.tfidf);
        #[cfg(feature = "parallel")]
        return dataset.instances.par_iter().map(make).collect();
        #[cfg(not(feature = "parallel"))]
        return dataset.instances.iter().map(make).collect();
    }
}
