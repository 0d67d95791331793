//! One-hidden-layer perceptron over sparse inputs.
//!
//! `probs = softmax(drop(relu(x W1 + b1)) W2 + b2)` where `drop` is
//! inverted dropout. When enabled, logit dropout is also applied to
//! `h W2 + b2` before the softmax. Weights are stored row-major: `W1` is
//! `input_dim x hidden`, `W2` is `hidden x 4`.
//!
//! All arithmetic is `f64`. Inference never applies dropout.

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::label::{StanceLabel, NUM_LABELS};
use crate::text::FeatureVector;

pub const NUM_CLASSES: usize = NUM_LABELS;

pub type Logits = [f64; NUM_CLASSES];

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    input_dim: usize,
    hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Gradient of the loss with respect to each parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub dw1: Vec<f64>,
    pub db1: Vec<f64>,
    pub dw2: Vec<f64>,
    pub db2: Vec<f64>,
}

impl MlpParams {
    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        MlpParams {
            input_dim,
            hidden,
            w1: vec![0.0; input_dim * hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden * NUM_CLASSES],
            b2: vec![0.0; NUM_CLASSES],
        }
    }

    /// Rebuilds parameters from flat row-major tensors.
    pub fn from_tensors(
        input_dim: usize,
        hidden: usize,
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: Vec<f64>,
    ) -> Result<Self> {
        let expect = [input_dim * hidden, hidden, hidden * NUM_CLASSES, NUM_CLASSES];
        for (e, t) in expect.iter().zip([&w1, &b1, &w2, &b2]) {
            if *e != t.len() {
                return Err(Error::DimensionMismatch { expected: *e, found: t.len() });
            }
        }
        Ok(MlpParams { input_dim, hidden, w1, b1, w2, b2 })
    }

    /// Glorot-uniform weights, zero biases, from a dedicated generator
    /// seeded with `seed`.
    pub fn init(input_dim: usize, hidden: usize, seed: u64) -> Self {
        Self::init_with_rng(input_dim, hidden, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Glorot-uniform: each weight matrix draws from `U(-L, L)` with
    /// `L = sqrt(6 / (fan_in + fan_out))`. W1 is drawn before W2.
    pub fn init_with_rng<R: Rng + ?Sized>(input_dim: usize, hidden: usize, rng: &mut R) -> Self {
        assert!(input_dim >= 1 && hidden >= 1, "layer sizes must be positive");
        let mut p = Self::zeros(input_dim, hidden);
        let fill = |w: &mut [f64], fan_in: usize, fan_out: usize, rng: &mut R| {
            let limit = glorot_limit(fan_in, fan_out);
            let dist = Uniform::new(-limit, limit);
            w.iter_mut().for_each(|x| *x = dist.sample(rng));
        };
        fill(&mut p.w1, input_dim, hidden, rng);
        fill(&mut p.w2, hidden, NUM_CLASSES, rng);
        p
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden
    }

    /// Sum of squared weights (biases excluded).
    pub fn weight_sq_sum(&self) -> f64 {
        self.w1.iter().chain(&self.w2).map(|w| w * w).sum()
    }

    pub fn tensors(&self) -> [&[f64]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    fn check_input(&self, x: &FeatureVector) -> Result<()> {
        if x.dim() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: x.dim() });
        }
        Ok(())
    }

    /// `relu(x W1 + b1)` accumulated over the sparse entries of `x`.
    fn hidden_pre(&self, x: &FeatureVector, out: &mut [f64]) {
        out.copy_from_slice(&self.b1);
        for &(i, v) in x.entries() {
            let row = &self.w1[i * self.hidden..(i + 1) * self.hidden];
            out.iter_mut().zip(row).for_each(|(o, w)| *o += v * w);
        }
    }

    fn output(&self, h: &[f64]) -> Logits {
        let mut z: Logits = self.b2.as_slice().try_into().expect("b2 has NUM_CLASSES entries");
        for (j, hj) in h.iter().enumerate() {
            if *hj != 0.0 {
                let row = &self.w2[j * NUM_CLASSES..(j + 1) * NUM_CLASSES];
                z.iter_mut().zip(row).for_each(|(o, w)| *o += hj * w);
            }
        }
        z
    }

    /// Inference logits (no dropout).
    pub fn logits(&self, x: &FeatureVector) -> Result<Logits> {
        self.check_input(x)?;
        let mut h = vec![0.0; self.hidden];
        self.hidden_pre(x, &mut h);
        h.iter_mut().for_each(|v| *v = v.max(0.0));
        Ok(self.output(&h))
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<StanceLabel> {
        Ok(predict_from_logits(&self.logits(x)?))
    }
}

impl Gradients {
    pub fn zeros_like(p: &MlpParams) -> Self {
        Gradients {
            dw1: vec![0.0; p.w1.len()],
            db1: vec![0.0; p.b1.len()],
            dw2: vec![0.0; p.w2.len()],
            db2: vec![0.0; p.b2.len()],
        }
    }

    pub fn tensors(&self) -> [&[f64]; 4] {
        [&self.dw1, &self.db1, &self.dw2, &self.db2]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 4] {
        [&mut self.dw1, &mut self.db1, &mut self.dw2, &mut self.db2]
    }

    /// L2 norm of all entries taken together.
    pub fn global_norm(&self) -> f64 {
        self.tensors().iter().flat_map(|t| t.iter()).map(|g| g * g).sum::<f64>().sqrt()
    }
}

pub fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// Index of the largest logit; ties go to the lowest label code.
pub fn predict_from_logits(z: &Logits) -> StanceLabel {
    let mut best = 0;
    for k in 1..NUM_CLASSES {
        if z[k] > z[best] {
            best = k;
        }
    }
    StanceLabel::from_code(best).expect("argmax is a valid code")
}

/// Max-shifted softmax.
pub fn softmax<const N: usize>(z: &[f64; N]) -> [f64; N] {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; N];
    let mut sum = 0.0;
    for (o, v) in out.iter_mut().zip(z) {
        *o = (v - max).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
    out
}

/// Keep-masks for one batch, row-major `batch x width`.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks {
    pub keep_prob: f64,
    pub hidden: Vec<bool>,
    /// Present when dropout is applied to the logits as well.
    pub logits: Option<Vec<bool>>,
}

impl DropoutMasks {
    /// Draws Bernoulli(keep_prob) masks, hidden layer first, then logits.
    pub fn sample<R: Rng + ?Sized>(
        keep_prob: f64,
        batch: usize,
        hidden: usize,
        dropout_logits: bool,
        rng: &mut R,
    ) -> Self {
        let mut draw = |n: usize| (0..n).map(|_| rng.gen::<f64>() < keep_prob).collect::<Vec<bool>>();
        let hidden = draw(batch * hidden);
        let logits = dropout_logits.then(|| draw(batch * NUM_CLASSES));
        DropoutMasks { keep_prob, hidden, logits }
    }
}

/// Dropout configuration for a training forward pass.
pub struct DropoutSpec<'r, R: Rng + ?Sized> {
    pub keep_prob: f64,
    pub dropout_logits: bool,
    pub rng: &'r mut R,
}

fn apply_mask(values: &[f64], mask: &[bool], keep_prob: f64) -> Vec<f64> {
    values.iter().zip(mask).map(|(v, m)| if *m { v / keep_prob } else { 0.0 }).collect()
}

/// Intermediate values of a batch forward pass, row-major per sample.
#[derive(Debug, Clone)]
pub struct ForwardCache<'a> {
    inputs: Vec<&'a FeatureVector>,
    input_dim: usize,
    hidden: usize,
    pub h_pre: Vec<f64>,
    pub h: Vec<f64>,
    pub h_drop: Vec<f64>,
    pub logits: Vec<Logits>,
    pub logits_drop: Vec<Logits>,
    pub probs: Vec<Logits>,
    pub masks: Option<DropoutMasks>,
}

impl ForwardCache<'_> {
    pub fn batch_size(&self) -> usize {
        self.inputs.len()
    }
}

/// Batch forward pass. Masks are drawn from `dropout.rng` when dropout is
/// given with `keep_prob < 1`; `keep_prob == 1` behaves exactly like no
/// dropout.
pub fn forward<'a, R: Rng + ?Sized>(
    params: &MlpParams,
    batch: &[&'a FeatureVector],
    dropout: Option<DropoutSpec<'_, R>>,
) -> Result<ForwardCache<'a>> {
    let masks = match dropout {
        Some(d) if d.keep_prob < 1.0 => {
            if d.keep_prob <= 0.0 {
                return Err(Error::Config(format!("keep_prob must lie in (0, 1], got {}", d.keep_prob)));
            }
            Some(DropoutMasks::sample(d.keep_prob, batch.len(), params.hidden, d.dropout_logits, d.rng))
        }
        _ => None,
    };
    forward_with_masks(params, batch, masks)
}

/// Batch forward pass with fixed dropout masks (or none).
pub fn forward_with_masks<'a>(
    params: &MlpParams,
    batch: &[&'a FeatureVector],
    masks: Option<DropoutMasks>,
) -> Result<ForwardCache<'a>> {
    let (b, hd) = (batch.len(), params.hidden);
    if let Some(m) = &masks {
        if m.hidden.len() != b * hd || m.logits.as_ref().is_some_and(|l| l.len() != b * NUM_CLASSES) {
            return Err(Error::DimensionMismatch { expected: b * hd, found: m.hidden.len() });
        }
    }
    let mut h_pre = vec![0.0; b * hd];
    for (x, row) in batch.iter().zip(h_pre.chunks_exact_mut(hd.max(1))) {
        params.check_input(x)?;
        params.hidden_pre(x, row);
    }
    let h: Vec<f64> = h_pre.iter().map(|v| v.max(0.0)).collect();
    let h_drop = match &masks {
        Some(m) => apply_mask(&h, &m.hidden, m.keep_prob),
        None => h.clone(),
    };
    let logits: Vec<Logits> = h_drop.chunks_exact(hd.max(1)).take(b).map(|row| params.output(row)).collect();
    let logits_drop: Vec<Logits> = match masks.as_ref().and_then(|m| m.logits.as_ref().map(|l| (m.keep_prob, l))) {
        Some((keep, mask)) => logits
            .iter()
            .zip(mask.chunks_exact(NUM_CLASSES))
            .map(|(z, m)| apply_mask(z, m, keep).try_into().expect("row width"))
            .collect(),
        None => logits.clone(),
    };
    let probs = logits_drop.iter().map(softmax).collect();
    Ok(ForwardCache {
        inputs: batch.to_vec(),
        input_dim: params.input_dim,
        hidden: hd,
        h_pre,
        h,
        h_drop,
        logits,
        logits_drop,
        probs,
        masks,
    })
}

/// Mean cross entropy plus `l2_alpha * (sum W1^2 + sum W2^2)`.
pub fn loss(probs: &[Logits], labels: &[StanceLabel], params: &MlpParams, l2_alpha: f64) -> Result<f64> {
    if probs.len() != labels.len() {
        return Err(Error::LengthMismatch { left: labels.len(), right: probs.len() });
    }
    if probs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ce: f64 = probs.iter().zip(labels).map(|(p, l)| -p[l.code()].ln()).sum::<f64>() / probs.len() as f64;
    Ok(ce + l2_alpha * params.weight_sq_sum())
}

/// Exact gradient of [`loss`] for the pass recorded in `cache`, with the
/// same dropout masks.
pub fn backward(cache: &ForwardCache<'_>, labels: &[StanceLabel], params: &MlpParams, l2_alpha: f64) -> Result<Gradients> {
    let (b, hd) = (cache.batch_size(), cache.hidden);
    if labels.len() != b {
        return Err(Error::StaleCache(format!("{} labels for a batch of {b}", labels.len())));
    }
    if b == 0 {
        return Err(Error::EmptyInput);
    }
    if cache.input_dim != params.input_dim || hd != params.hidden {
        return Err(Error::StaleCache(format!(
            "cache shape {}x{} vs params {}x{}",
            cache.input_dim, hd, params.input_dim, params.hidden
        )));
    }

    let scale = 1.0 / b as f64;
    let mut g = Gradients::zeros_like(params);
    g.dw1.iter_mut().zip(&params.w1).for_each(|(d, w)| *d = 2.0 * l2_alpha * w);
    g.dw2.iter_mut().zip(&params.w2).for_each(|(d, w)| *d = 2.0 * l2_alpha * w);

    let mut dh = vec![0.0; hd];
    for s in 0..b {
        // d loss / d logits_drop, then back through the logit mask.
        let mut dz = cache.probs[s];
        dz[labels[s].code()] -= 1.0;
        dz.iter_mut().for_each(|v| *v *= scale);
        if let Some(m) = cache.masks.as_ref().and_then(|m| m.logits.as_ref().map(|l| (m.keep_prob, l))) {
            let (keep, mask) = m;
            for (k, v) in dz.iter_mut().enumerate() {
                *v = if mask[s * NUM_CLASSES + k] { *v / keep } else { 0.0 };
            }
        }

        let h_drop = &cache.h_drop[s * hd..(s + 1) * hd];
        for k in 0..NUM_CLASSES {
            g.db2[k] += dz[k];
        }
        for j in 0..hd {
            let row = &params.w2[j * NUM_CLASSES..(j + 1) * NUM_CLASSES];
            let grow = &mut g.dw2[j * NUM_CLASSES..(j + 1) * NUM_CLASSES];
            let mut acc = 0.0;
            for k in 0..NUM_CLASSES {
                grow[k] += h_drop[j] * dz[k];
                acc += row[k] * dz[k];
            }
            dh[j] = acc;
        }

        // Hidden mask, then ReLU.
        let h_pre = &cache.h_pre[s * hd..(s + 1) * hd];
        for j in 0..hd {
            if let Some(m) = &cache.masks {
                dh[j] = if m.hidden[s * hd + j] { dh[j] / m.keep_prob } else { 0.0 };
            }
            if h_pre[j] <= 0.0 {
                dh[j] = 0.0;
            }
            g.db1[j] += dh[j];
        }
        for &(i, x) in cache.inputs[s].entries() {
            let grow = &mut g.dw1[i * hd..(i + 1) * hd];
            grow.iter_mut().zip(&dh).for_each(|(d, v)| *d += x * v);
        }
    }
    Ok(g)
}
