//! Global-norm gradient clipping and Adam.

use crate::error::{Error, Result};
use crate::nn::{Gradients, MlpParams};

/// Rescales `grads` in place so that their joint L2 norm is at most
/// `clip_ratio`. Returns the norm before clipping.
pub fn clip_global_norm(grads: &mut Gradients, clip_ratio: f64) -> Result<f64> {
    if !(clip_ratio > 0.0) {
        return Err(Error::Config(format!("clip_ratio must be positive, got {clip_ratio}")));
    }
    if grads.tensors().iter().any(|t| t.iter().any(|g| !g.is_finite())) {
        return Err(Error::NonFiniteGradient);
    }
    let norm = grads.global_norm();
    if norm > clip_ratio {
        let c = clip_ratio / norm;
        for t in grads.tensors_mut() {
            t.iter_mut().for_each(|g| *g *= c);
        }
    }
    Ok(norm)
}

/// Adam moment estimates, shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Gradients,
    pub v: Gradients,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub const BETA1: f64 = 0.9;
    pub const BETA2: f64 = 0.999;
    pub const EPS: f64 = 1e-8;

    pub fn new(params: &MlpParams) -> Self {
        AdamState {
            m: Gradients::zeros_like(params),
            v: Gradients::zeros_like(params),
            t: 0,
            beta1: Self::BETA1,
            beta2: Self::BETA2,
            eps: Self::EPS,
        }
    }

    /// One bias-corrected Adam update of `params`.
    pub fn step(&mut self, params: &mut MlpParams, grads: &Gradients, learn_rate: f64) {
        self.t += 1;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        let bc1 = 1.0 - b1.powi(self.t as i32);
        let bc2 = 1.0 - b2.powi(self.t as i32);
        let tensors = params
            .tensors_mut()
            .into_iter()
            .zip(grads.tensors())
            .zip(self.m.tensors_mut().into_iter().zip(self.v.tensors_mut()));
        for ((theta, g), (m, v)) in tensors {
            assert_eq!(theta.len(), g.len(), "gradient shape does not match parameters");
            for i in 0..theta.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                theta[i] -= learn_rate * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}
