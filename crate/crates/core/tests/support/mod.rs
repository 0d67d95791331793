//! Test-only oracles, independent of the library's implementation paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use regex::Regex;
use stance_core::corpus::{write_bodies, write_stances};
use stance_core::nn::{forward_with_masks, loss, DropoutMasks};
use stance_core::{Dataset, MlpParams, SparseVector, StanceLabel};

/// Tokenizer oracle: lowercase, then the regex `(?u)\b\w\w+\b`.
pub fn oracle_tokens(text: &str) -> Vec<String> {
    static RE: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"(?u)\b\w\w+\b").unwrap());
    let lower = text.to_lowercase();
    re.find_iter(&lower).map(|m| m.as_str().to_string()).collect()
}

/// Top-`limit` terms by total count, ties lexicographic.
pub fn oracle_vocab(docs: &[String], limit: usize, stops: &HashSet<String>) -> Vec<String> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for d in docs {
        for t in oracle_tokens(d) {
            if !stops.contains(&t) {
                *counts.entry(t).or_default() += 1;
            }
        }
    }
    let mut v: Vec<(String, usize)> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.into_iter().take(limit).map(|(t, _)| t).collect()
}

pub fn oracle_counts(vocab: &[String], text: &str) -> Vec<f64> {
    let mut c: HashMap<String, f64> = HashMap::new();
    for t in oracle_tokens(text) {
        *c.entry(t).or_default() += 1.0;
    }
    vocab.iter().map(|t| c.get(t).copied().unwrap_or(0.0)).collect()
}

pub fn oracle_idf(vocab: &[String], docs: &[String]) -> Vec<f64> {
    let n = docs.len() as f64;
    let sets: Vec<HashSet<String>> = docs.iter().map(|d| oracle_tokens(d).into_iter().collect()).collect();
    vocab
        .iter()
        .map(|t| {
            let df = sets.iter().filter(|s| s.contains(t)).count() as f64;
            ((1.0 + n) / (1.0 + df)).ln() + 1.0
        })
        .collect()
}

pub fn oracle_tfidf(vocab: &[String], idf: &[f64], text: &str) -> Vec<f64> {
    let w: Vec<f64> = oracle_counts(vocab, text).iter().zip(idf).map(|(c, i)| c * i).collect();
    let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        w
    } else {
        w.iter().map(|x| x / n).collect()
    }
}

pub fn oracle_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Loss as a function of the parameters with masks held fixed.
pub fn loss_at(params: &MlpParams, batch: &[&SparseVector], labels: &[StanceLabel], masks: &Option<DropoutMasks>, l2: f64) -> f64 {
    let c = forward_with_masks(params, batch, masks.clone()).unwrap();
    loss(&c.probs, labels, params, l2).unwrap()
}

/// Central finite differences of [`loss_at`] for every parameter, step `h`,
/// in tensor order W1, b1, W2, b2.
pub fn finite_difference_grads(
    params: &MlpParams,
    batch: &[&SparseVector],
    labels: &[StanceLabel],
    masks: &Option<DropoutMasks>,
    l2: f64,
    h: f64,
) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for t in 0..4 {
        let len = params.tensors()[t].len();
        let mut g = Vec::with_capacity(len);
        for i in 0..len {
            let mut plus = params.clone();
            plus.tensors_mut()[t][i] += h;
            let mut minus = params.clone();
            minus.tensors_mut()[t][i] -= h;
            g.push((loss_at(&plus, batch, labels, masks, l2) - loss_at(&minus, batch, labels, masks, l2)) / (2.0 * h));
        }
        out.push(g);
    }
    out
}

pub fn write_dataset(ds: &Dataset, bodies: &Path, stances: &Path) {
    write_bodies(std::fs::File::create(bodies).unwrap(), ds.bodies.values()).unwrap();
    write_stances(std::fs::File::create(stances).unwrap(), &ds.instances).unwrap();
}

/// `|a - n| / max(|a|, |n|, 1e-4)`. Below 1e-4 in magnitude this is an
/// absolute error, since central differences at h = 1e-5 carry ~1e-11 of
/// rounding noise.
pub fn gradient_rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-4)
}

pub struct GradCase {
    pub params: MlpParams,
    pub inputs: Vec<SparseVector>,
    pub labels: Vec<StanceLabel>,
    pub l2_alpha: f64,
}

/// Random small configuration: input dim <= 20, hidden <= 8, batch <= 5,
/// non-zero biases, sparse non-negative inputs.
pub fn random_grad_case(seed: u64) -> GradCase {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(2..=20);
    let hd = rng.gen_range(1..=8);
    let b = rng.gen_range(1..=5);
    let mut params = MlpParams::init(d, hd, seed ^ 0x5eed);
    for x in params.b1.iter_mut().chain(params.b2.iter_mut()) {
        *x = rng.gen_range(-0.5..0.5);
    }
    let inputs = (0..b)
        .map(|_| {
            let dense: Vec<f64> =
                (0..d).map(|_| if rng.gen_bool(0.5) { rng.gen_range(0.0..3.0) } else { 0.0 }).collect();
            SparseVector::from_dense(&dense)
        })
        .collect();
    let labels = (0..b).map(|_| StanceLabel::from_code(rng.gen_range(0..4)).unwrap()).collect();
    GradCase { params, inputs, labels, l2_alpha: rng.gen_range(0.0..0.01) }
}

/// Worst [`gradient_rel_err`] between backward and finite differences.
pub fn worst_gradient_error(case: &GradCase, masks: Option<DropoutMasks>) -> f64 {
    let batch: Vec<&SparseVector> = case.inputs.iter().collect();
    let cache = forward_with_masks(&case.params, &batch, masks.clone()).unwrap();
    let g = stance_core::nn::backward(&cache, &case.labels, &case.params, case.l2_alpha).unwrap();
    let fd = finite_difference_grads(&case.params, &batch, &case.labels, &masks, case.l2_alpha, 1e-5);
    g.tensors()
        .iter()
        .zip(&fd)
        .flat_map(|(a, n)| a.iter().zip(n).map(|(a, n)| gradient_rel_err(*a, *n)))
        .fold(0.0, f64::max)
}
