//! Bag-of-words representations: tokenization, stop words, TF and TF-IDF
//! vocabularies, cosine similarity and feature assembly.

pub mod features;
pub mod stopwords;
pub mod tfidf;
pub mod tokenize;
pub mod vocab;

pub use features::{assemble_features, feature_dim, FeatureExtractor, FeatureVector};
pub use stopwords::StopWordList;
pub use tfidf::{build_tfidf_model, cosine, tfidf_vector, TfIdfModel};
pub use tokenize::tokenize;
pub use vocab::{build_tf_vocabulary, tf_vector, Vocabulary};
