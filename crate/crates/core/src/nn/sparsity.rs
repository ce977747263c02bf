//! KL-divergence sparsity penalty on the mean activation of a sigmoid layer.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Mean activations are clamped into `[CLAMP, 1 - CLAMP]` before the KL terms.
pub const CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sparsity {
    /// Desired mean activation, in `(0, 1)`.
    pub target: f64,
    /// Penalty weight, `>= 0`.
    pub weight: f64,
    /// Index of the layer whose outputs are penalized. Must be a sigmoid layer.
    pub layer: usize,
}

impl Sparsity {
    pub fn validate(&self) -> Result<()> {
        if !(self.target > 0.0 && self.target < 1.0) {
            return Err(Error::argument("sparsity target must lie in (0, 1)"));
        }
        if !(self.weight >= 0.0 && self.weight.is_finite()) {
            return Err(Error::argument("sparsity weight must be finite and >= 0"));
        }
        Ok(())
    }
}

/// `KL(a || b) = a ln(a/b) + (1-a) ln((1-a)/(1-b))`.
pub fn kl_bernoulli(a: f64, b: f64) -> f64 {
    a * libm::log(a / b) + (1.0 - a) * libm::log((1.0 - a) / (1.0 - b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityPenalty {
    pub value: f64,
    /// Gradient of `value` w.r.t. each activation, row-major like the input batch.
    pub gradient: Vec<f64>,
    pub mean_activation: Vec<f64>,
    /// Set when any mean activation had to be clamped.
    pub clamped: bool,
}

/// Evaluates `weight * sum_j KL(target || mean_j)` over a row-major batch of
/// activations with `width` neurons per row, together with its gradient.
pub fn sparsity_penalty(activations: &[f64], width: usize, target: f64, weight: f64) -> Result<SparsityPenalty> {
    if width == 0 || activations.is_empty() || !activations.len().is_multiple_of(width) {
        return Err(Error::shape("sparsity penalty needs a nonempty batch of whole rows"));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::argument("sparsity target must lie in (0, 1)"));
    }
    let batch = activations.len() / width;
    let mut mean = vec![0.0; width];
    for row in activations.chunks_exact(width) {
        for (m, a) in mean.iter_mut().zip(row) {
            *m += a;
        }
    }
    let mut clamped = false;
    for m in &mut mean {
        *m /= batch as f64;
        if *m < CLAMP || *m > 1.0 - CLAMP {
            clamped = true;
            *m = m.clamp(CLAMP, 1.0 - CLAMP);
        }
    }
    let value = weight * mean.iter().map(|&m| kl_bernoulli(target, m)).sum::<f64>();
    let per_neuron: Vec<f64> =
        mean.iter().map(|&m| weight * (-target / m + (1.0 - target) / (1.0 - m)) / batch as f64).collect();
    let mut gradient = Vec::with_capacity(activations.len());
    for _ in 0..batch {
        gradient.extend_from_slice(&per_neuron);
    }
    Ok(SparsityPenalty { value, gradient, mean_activation: mean, clamped })
}
