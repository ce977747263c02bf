//! Denoising autoencoders: a dense network whose output width equals its
//! input width, trained to map corrupted samples onto their clean versions.
//!
//! The encoder is the leading part of the layer stack up to the innermost
//! hidden representation; the decoder is the rest.

use alloc::format;
use alloc::vec::Vec;

use crate::nn::{self, Activation, DenseLayer, LossHistory, Network, SampleSet, TrainSpec};
use crate::{Error, Result};

pub use crate::nn::{sparsity_penalty, Sparsity, SparsityPenalty};

/// Architecture of an autoencoder, written the usual way as its hidden
/// widths (`{20, 25, 30, 25, 20}`).
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderSpec {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    /// One activation per layer (`hidden_dims.len() + 1`); `None` means every
    /// layer sigmoid except a linear output.
    pub activations: Option<Vec<Activation>>,
}

impl AutoencoderSpec {
    pub fn new(input_dim: usize, hidden_dims: &[usize]) -> Self {
        AutoencoderSpec { input_dim, hidden_dims: hidden_dims.to_vec(), activations: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::argument("autoencoder input dim must be >= 1"));
        }
        if self.hidden_dims.is_empty() {
            return Err(Error::argument("autoencoder needs at least one hidden layer"));
        }
        if self.hidden_dims.contains(&0) {
            return Err(Error::argument("hidden widths must be >= 1"));
        }
        if let Some(acts) = &self.activations {
            if acts.len() != self.hidden_dims.len() + 1 {
                return Err(Error::argument(format!(
                    "{} activations given for {} layers",
                    acts.len(),
                    self.hidden_dims.len() + 1
                )));
            }
        }
        Ok(())
    }

    /// `[input, hidden.., input]`.
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 2);
        dims.push(self.input_dim);
        dims.extend_from_slice(&self.hidden_dims);
        dims.push(self.input_dim);
        dims
    }

    pub fn activation(&self, layer: usize) -> Activation {
        match &self.activations {
            Some(acts) => acts[layer],
            None if layer == self.hidden_dims.len() => Activation::Linear,
            None => Activation::Sigmoid,
        }
    }
}

/// Glorot-initialized autoencoder with identity normalizations.
pub fn build(spec: &AutoencoderSpec, seed: u64) -> Result<Network> {
    spec.validate()?;
    let mut rng = crate::rng_from_seed(seed);
    let dims = spec.layer_dims();
    let layers = dims
        .windows(2)
        .enumerate()
        .map(|(i, w)| DenseLayer::glorot(w[0], w[1], spec.activation(i), &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Network::new(layers)
}

/// Number of leading layers that make up the encoder: the layers up to and
/// including the innermost hidden representation (the lower middle one when
/// the hidden count is even).
pub fn encoder_depth(net: &Network) -> usize {
    net.layers().len() / 2
}

/// Hidden representation `y` of a raw input.
pub fn encode(net: &Network, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != net.input_dim() {
        return Err(Error::shape(format!("input has {} values, encoder expects {}", x.len(), net.input_dim())));
    }
    net.forward_normalized_range(net.input_norm().normalize(x), 0, encoder_depth(net))
}

/// Raw output reconstructed from a hidden representation.
pub fn decode(net: &Network, y: &[f64]) -> Result<Vec<f64>> {
    let z = net.forward_normalized_range(y.to_vec(), encoder_depth(net), net.layers().len())?;
    Ok(net.output_norm().denormalize(&z))
}

/// Trains `corrupted -> clean`. Samples flagged noise-free are used as
/// `(clean, clean)` pairs regardless of what their corrupted slot holds.
pub fn train_denoiser(
    net: &Network,
    train: &SampleSet,
    valid: &SampleSet,
    spec: &TrainSpec,
) -> Result<(Network, LossHistory)> {
    if net.input_dim() != net.output_dim() {
        return Err(Error::shape("a denoiser must emit as many values as it reads"));
    }
    nn::train(net, &train.with_clean_pairs_enforced(), &valid.with_clean_pairs_enforced(), spec)
}

/// Mean activation of each neuron of hidden layer `layer` over the corrupted
/// inputs of `set`.
pub fn mean_hidden_activation(net: &Network, set: &SampleSet, layer: usize) -> Result<Vec<f64>> {
    if layer + 1 >= net.layers().len() {
        return Err(Error::argument(format!("layer {layer} is not a hidden layer")));
    }
    if set.is_empty() {
        return Err(Error::argument("mean activation of an empty set"));
    }
    let width = net.layers()[layer].out_dim();
    let mut mean = alloc::vec![0.0; width];
    for i in 0..set.len() {
        let a = net.forward_normalized_range(net.input_norm().normalize(set.corrupted(i)), 0, layer + 1)?;
        for (m, v) in mean.iter_mut().zip(a) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= set.len() as f64);
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    #[test]
    fn layer_dims_from_hidden_spec() {
        let net = build(&AutoencoderSpec::new(9, &[7, 5, 7]), 0).unwrap();
        assert_eq!(net.dims(), vec![9, 7, 5, 7, 9]);
        assert_eq!(net.layers().len(), 4);
        let net = build(&AutoencoderSpec::new(20, &[20, 20]), 0).unwrap();
        assert_eq!(net.dims(), vec![20, 20, 20, 20]);
        let net = build(&AutoencoderSpec::new(17, &[4]), 0).unwrap();
        assert_eq!(net.dims(), vec![17, 4, 17]);
    }

    #[test]
    fn default_activations_are_sigmoid_then_linear() {
        let net = build(&AutoencoderSpec::new(9, &[7, 5, 7]), 0).unwrap();
        let acts: Vec<_> = net.layers().iter().map(|l| l.activation()).collect();
        assert_eq!(acts, [Activation::Sigmoid, Activation::Sigmoid, Activation::Sigmoid, Activation::Linear]);
    }

    #[test]
    fn encode_width_is_innermost() {
        let net = build(&AutoencoderSpec::new(9, &[7, 5, 7]), 4).unwrap();
        assert_eq!(encode(&net, &[0.1; 9]).unwrap().len(), 5);
        let net = build(&AutoencoderSpec::new(20, &[20, 20]), 4).unwrap();
        assert_eq!(encode(&net, &[0.1; 20]).unwrap().len(), 20);
    }

    #[test]
    fn zero_encoder_gives_half() {
        let mut net = build(&AutoencoderSpec::new(4, &[3]), 1).unwrap();
        net.layers_mut()[0].weights_mut().fill(0.0);
        assert_eq!(encode(&net, &[5.0, -2.0, 1.0, 0.0]).unwrap(), vec![0.5; 3]);
    }

    #[test]
    fn encode_then_decode_is_forward() {
        let net = build(&AutoencoderSpec::new(6, &[5, 2, 5]), 9).unwrap();
        let x = [0.3, -0.1, 0.8, 0.0, 1.5, -2.0];
        assert_eq!(decode(&net, &encode(&net, &x).unwrap()).unwrap(), net.forward(&x).unwrap());
    }

    #[test]
    fn invalid_specs() {
        assert!(AutoencoderSpec::new(5, &[]).validate().is_err());
        assert!(AutoencoderSpec::new(0, &[3]).validate().is_err());
        assert!(AutoencoderSpec::new(5, &[0]).validate().is_err());
        let spec = AutoencoderSpec { activations: Some(vec![Activation::Linear]), ..AutoencoderSpec::new(5, &[3]) };
        assert!(spec.validate().is_err());
    }
}
