//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string so the page can stay plain JS. The
//! functions are ordinary Rust too, which is how the tests call them.

use serde_json::{json, Value};
use stance_core::nn::{predict_from_logits, softmax};
use stance_core::text::{
    build_tf_vocabulary, build_tfidf_model, cosine, tf_vector, tfidf_vector, tokenize, FeatureExtractor, StopWordList,
    Vocabulary,
};
use stance_core::{fit, ConfusionMatrix, StanceLabel, TrainConfig};
use wasm_bindgen::prelude::*;

fn error_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn counts(vocab: &Vocabulary, text: &str) -> Value {
    let v = tf_vector(vocab, text);
    let map: serde_json::Map<String, Value> =
        v.entries().iter().map(|&(i, c)| (vocab.terms()[i].clone(), json!(c))).collect();
    Value::Object(map)
}

/// Tokens, stop-word filtering, term counts and TF-IDF cosine for one
/// headline/body pair. The vocabularies are fit on the pair itself.
#[wasm_bindgen]
pub fn featurize(headline: &str, body: &str) -> String {
    let stops = StopWordList::english();
    let docs = [headline.to_string(), body.to_string()];
    let tf_vocab = build_tf_vocabulary(&docs, 5000, &stops);
    let model = build_tfidf_model(&docs, 5000, &stops);
    let sim = cosine(&tfidf_vector(&model, headline), &tfidf_vector(&model, body)).unwrap_or(0.0);
    let kept = |text: &str| -> Vec<String> { tokenize(text).into_iter().filter(|t| !stops.contains(t)).collect() };
    json!({
        "headline_tokens": tokenize(headline),
        "body_tokens": tokenize(body),
        "headline_kept": kept(headline),
        "body_kept": kept(body),
        "headline_tf": counts(&tf_vocab, headline),
        "body_tf": counts(&tf_vocab, body),
        "cosine": sim.clamp(0.0, 1.0),
        "feature_dim": 2 * tf_vocab.len() + 1,
    })
    .to_string()
}

/// FNC-1 score report for a 4x4 confusion matrix given row-major, gold
/// label by row, in the order agree, disagree, discuss, unrelated.
#[wasm_bindgen]
pub fn fnc1_from_matrix(cells: Vec<u32>) -> String {
    if cells.len() != 16 {
        return error_json(format!("expected 16 cells, got {}", cells.len()));
    }
    let mut counts = [[0u64; 4]; 4];
    for (i, c) in cells.iter().enumerate() {
        counts[i / 4][i % 4] = u64::from(*c);
    }
    let cm = ConfusionMatrix::from_counts(counts);
    if cm.total() == 0 {
        return error_json("matrix is empty");
    }
    match cm.report() {
        Ok(r) => json!({
            "points": r.fnc1_points,
            "max_points": r.fnc1_max_points,
            "percent": r.fnc1_percent,
            "overall_accuracy": 100.0 * r.overall_accuracy,
            "per_class_accuracy": r.per_class_accuracy.iter().map(|a| 100.0 * a).collect::<Vec<_>>(),
            "text": r.to_string(),
        })
        .to_string(),
        Err(e) => error_json(e),
    }
}

/// Trains the network on a small synthetic corpus and returns the loss
/// curve, training accuracy and a few sample predictions.
#[wasm_bindgen]
pub fn train_toy(learn_rate: f64, keep_prob: f64, clip_ratio: f64, l2_alpha: f64, epochs: u32, seed: u32) -> String {
    let config = TrainConfig {
        learn_rate,
        train_keep_prob: keep_prob,
        clip_ratio,
        l2_alpha,
        epochs: epochs as usize,
        seed: u64::from(seed),
        hidden_size: 32,
        batch_size: 50,
        ..TrainConfig::default()
    };
    if let Err(e) = config.validate() {
        return error_json(e);
    }
    let data = stance_core::synthetic::separable_dataset(120, 7);
    let extractor = FeatureExtractor::fit(&data, &data.unique_texts(), config.lim_unigram, &StopWordList::english());
    let features = extractor.featurize(&data);
    let labels: Vec<StanceLabel> = match data.labels() {
        Ok(l) => l,
        Err(e) => return error_json(e),
    };
    let (params, losses) = match fit(&features, &labels, &config, |_, _| {}) {
        Ok(r) => r,
        Err(e) => return error_json(e),
    };
    let logits = match features.iter().map(|x| params.logits(x)).collect::<stance_core::Result<Vec<_>>>() {
        Ok(z) => z,
        Err(e) => return error_json(e),
    };
    let pred: Vec<StanceLabel> = logits.iter().map(predict_from_logits).collect();
    let correct = pred.iter().zip(&labels).filter(|(p, t)| p == t).count();
    let samples: Vec<Value> = (0..data.len())
        .step_by(29)
        .take(4)
        .map(|i| {
            json!({
                "headline": data.instances[i].headline,
                "gold": labels[i].as_str(),
                "predicted": pred[i].as_str(),
                "probs": softmax(&logits[i]),
            })
        })
        .collect();
    json!({
        "losses": losses,
        "train_accuracy": 100.0 * correct as f64 / labels.len() as f64,
        "instances": labels.len(),
        "input_dim": extractor.input_dim(),
        "samples": samples,
    })
    .to_string()
}
