//! Mini-batch training and the repeated hold-out evaluation harness.
//!
//! Randomness comes from one ChaCha8 stream seeded with `config.seed`,
//! consumed in this order: weight initialisation, then for every epoch the
//! instance shuffle followed by the dropout masks of each batch in turn.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::config::TrainConfig;
use crate::corpus::{split_by_body_id, Dataset};
use crate::error::{Error, Result};
use crate::eval::fnc1_score;
use crate::label::StanceLabel;
use crate::model::ModelBundle;
use crate::nn::{backward, forward, DropoutSpec, MlpParams};
use crate::optim::{clip_global_norm, AdamState};
use crate::text::{FeatureExtractor, FeatureVector, StopWordList};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean training loss per epoch (dropout active, L2 included).
    pub epoch_losses: Vec<f64>,
    pub epochs: usize,
    pub wall_time: Duration,
    pub seed: u64,
    pub config: TrainConfig,
}

/// A fresh random permutation of `0..n` cut into consecutive batches of
/// `batch_size`; the last batch may be shorter.
pub fn epoch_batches<R: rand::Rng + ?Sized>(n: usize, batch_size: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(batch_size.max(1)).map(<[usize]>::to_vec).collect()
}

/// Trains network parameters on pre-computed features.
///
/// `on_epoch(epoch, mean_loss)` is called after every epoch. Returns the
/// final parameters and the per-epoch losses.
pub fn fit(
    features: &[FeatureVector],
    labels: &[StanceLabel],
    config: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<(MlpParams, Vec<f64>)> {
    config.validate()?;
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch { left: labels.len(), right: features.len() });
    }
    let input_dim = match features.first() {
        Some(x) => x.dim(),
        None => return Err(Error::EmptyInput),
    };
    if let Some(x) = features.iter().find(|x| x.dim() != input_dim) {
        return Err(Error::DimensionMismatch { expected: input_dim, found: x.dim() });
    }
    if labels.iter().all(|l| *l == labels[0]) {
        log::warn!("every training instance is labeled `{}`", labels[0]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = MlpParams::init_with_rng(input_dim, config.hidden_size, &mut rng);
    let mut adam = AdamState::new(&params);
    let mut losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let mut total = 0.0;
        for chunk in epoch_batches(features.len(), config.batch_size, &mut rng) {
            let batch: Vec<&FeatureVector> = chunk.iter().map(|&i| &features[i]).collect();
            let batch_labels: Vec<StanceLabel> = chunk.iter().map(|&i| labels[i]).collect();
            let spec = DropoutSpec {
                keep_prob: config.train_keep_prob,
                dropout_logits: config.dropout_logits,
                rng: &mut rng,
            };
            let cache = forward(&params, &batch, Some(spec))?;
            let batch_loss = crate::nn::loss(&cache.probs, &batch_labels, &params, config.l2_alpha)?;
            let mut grads = backward(&cache, &batch_labels, &params, config.l2_alpha)?;
            clip_global_norm(&mut grads, config.clip_ratio)?;
            adam.step(&mut params, &grads, config.learn_rate);
            total += batch_loss * chunk.len() as f64;
        }
        let mean = total / features.len() as f64;
        on_epoch(epoch, mean);
        losses.push(mean);
    }
    Ok((params, losses))
}

/// Full training pipeline on a labeled dataset with the bundled English
/// stop words. See [`train_with`].
pub fn train(train_data: &Dataset, config: &TrainConfig, vocab_corpus: &[String]) -> Result<(ModelBundle, TrainReport)> {
    train_with(train_data, config, vocab_corpus, &StopWordList::english(), |_, _| {})
}

/// Fits the TF vocabulary on the training texts, the TF-IDF model on
/// `vocab_corpus`, extracts features once and runs [`fit`].
pub fn train_with(
    train_data: &Dataset,
    config: &TrainConfig,
    vocab_corpus: &[String],
    stops: &StopWordList,
    on_epoch: impl FnMut(usize, f64),
) -> Result<(ModelBundle, TrainReport)> {
    config.validate()?;
    train_data.validate()?;
    if train_data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let labels = train_data.labels()?;
    let start = Instant::now();
    let extractor = FeatureExtractor::fit(train_data, vocab_corpus, config.lim_unigram, stops);
    let features = extractor.featurize(train_data);
    let (params, epoch_losses) = fit(&features, &labels, config, on_epoch)?;
    let bundle = ModelBundle::new(extractor, params, config.clone())?;
    let report = TrainReport {
        epochs: epoch_losses.len(),
        epoch_losses,
        wall_time: start.elapsed(),
        seed: config.seed,
        config: config.clone(),
    };
    Ok((bundle, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    /// Hold-out FNC-1 percentage of each split, in split order.
    pub scores: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

/// Trains and scores on `n_splits` body-disjoint train/hold-out splits.
///
/// Split `i` uses seed `config.seed + i` both for the partition and for
/// training. The TF-IDF corpus of every split is the full dataset's
/// deduplicated texts, so hold-out texts enter only that vocabulary.
pub fn multi_split_evaluate(
    dataset: &Dataset,
    config: &TrainConfig,
    n_splits: usize,
    holdout_fraction: f64,
) -> Result<SplitReport> {
    if n_splits == 0 {
        return Err(Error::Config("n_splits must be at least 1".into()));
    }
    dataset.labels()?;
    let corpus = dataset.unique_texts();
    let stops = StopWordList::english();
    let run = |i: usize| -> Result<f64> {
        let seed = config.seed.wrapping_add(i as u64);
        let (train_part, holdout) = split_by_body_id(dataset, holdout_fraction, seed)?;
        let cfg = TrainConfig { seed, ..config.clone() };
        let (bundle, _) = train_with(&train_part, &cfg, &corpus, &stops, |_, _| {})?;
        let pred = bundle.predict(&holdout)?;
        Ok(fnc1_score(&holdout.labels()?, &pred)?.fnc1_percent)
    };
    #[cfg(feature = "parallel")]
    let scores: Vec<f64> = (0..n_splits).into_par_iter().map(run).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let scores: Vec<f64> = (0..n_splits).map(run).collect::<Result<_>>()?;

    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let std = (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SplitReport { scores, mean, std })
}
