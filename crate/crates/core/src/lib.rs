//! Headline/body stance detection.
//!
//! Given a news headline and an article body, classify the body's stance
//! as agree, disagree, discuss or unrelated. Each pair is represented by
//! the term-frequency vectors of headline and body plus the cosine
//! similarity of their TF-IDF vectors, and classified by a perceptron with
//! one ReLU hidden layer trained with Adam, dropout, L2 regularisation and
//! global-norm gradient clipping.
//!
//! Module map:
//! - [`corpus`]: CSV datasets, validation, body-disjoint splits
//! - [`text`]: tokenizer, vocabularies, TF/TF-IDF, feature assembly
//! - [`nn`]: forward pass, loss, analytic gradients, prediction
//! - [`optim`]: gradient clipping and Adam
//! - [`train`]: training loop and repeated hold-out evaluation
//! - [`eval`]: confusion matrix, accuracies, FNC-1 score
//! - [`persist`]: model bundle files

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod label;
pub mod model;
pub mod nn;
pub mod optim;
pub mod persist;
pub mod sparse;
pub mod synthetic;
pub mod text;
pub mod train;

pub use config::TrainConfig;
pub use corpus::{split_by_body_id, ArticleBody, Dataset, Instance};
pub use error::{Error, Result};
pub use eval::{confusion_matrix, fnc1_score, ConfusionMatrix, ScoreReport};
pub use label::StanceLabel;
pub use model::ModelBundle;
pub use nn::{Gradients, MlpParams};
pub use sparse::SparseVector;
pub use train::{fit, multi_split_evaluate, train, train_with, SplitReport, TrainReport};
