use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, Uniform};
use rand::Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    /// `1 / (1 + e^-u)`
    Sigmoid,
    /// Identity.
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, u: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(u),
            Activation::Linear => u,
        }
    }

    /// Derivative expressed through the activation value itself.
    #[inline]
    pub fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Linear => 1.0,
        }
    }
}

/// Clamped so that saturation never reaches exactly 0 or 1.
#[inline]
pub fn sigmoid(u: f64) -> f64 {
    (1.0 / (1.0 + libm::exp(-u))).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// One affine map followed by an elementwise activation.
///
/// `weights` is row-major `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::shape(format!("layer dims must be >= 1, got {in_dim}->{out_dim}")));
        }
        Ok(DenseLayer { in_dim, out_dim, weights: vec![0.0; in_dim * out_dim], biases: vec![0.0; out_dim], activation })
    }

    pub fn from_parts(
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::shape(format!("layer dims must be >= 1, got {in_dim}->{out_dim}")));
        }
        if weights.len() != in_dim * out_dim || biases.len() != out_dim {
            return Err(Error::shape(format!(
                "layer {in_dim}->{out_dim} needs {} weights and {out_dim} biases, got {} and {}",
                in_dim * out_dim,
                weights.len(),
                biases.len()
            )));
        }
        if !weights.iter().chain(&biases).all(|v| v.is_finite()) {
            return Err(Error::Numeric(format!("layer {in_dim}->{out_dim} has non-finite parameters")));
        }
        Ok(DenseLayer { in_dim, out_dim, weights, biases, activation })
    }

    /// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn glorot<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut R) -> Result<Self> {
        let mut layer = DenseLayer::zeros(in_dim, out_dim, activation)?;
        let limit = libm::sqrt(6.0 / (in_dim + out_dim) as f64);
        let dist = Uniform::new_inclusive(-limit, limit);
        for w in &mut layer.weights {
            *w = dist.sample(rng);
        }
        Ok(layer)
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    #[inline]
    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn set_activation(&mut self, activation: Activation) {
        self.activation = activation;
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    #[inline]
    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    #[inline]
    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    pub fn weight(&self, out: usize, inp: usize) -> f64 {
        self.weights[out * self.in_dim + inp]
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    /// Single-sample forward pass on an already-normalized input.
    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        debug_assert_eq!(input.len(), self.in_dim);
        (0..self.out_dim)
            .map(|o| {
                let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
                self.activation.apply(super::kernels::dot(row, input) + self.biases[o])
            })
            .collect()
    }
}
