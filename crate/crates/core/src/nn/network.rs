use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::layer::{Activation, DenseLayer};
use crate::{Error, Result};

/// Per-feature affine normalization: `normalized = (raw - shift) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    shift: Vec<f64>,
    scale: Vec<f64>,
}

impl Affine {
    pub fn identity(dim: usize) -> Self {
        Affine { shift: vec![0.0; dim], scale: vec![1.0; dim] }
    }

    pub fn new(shift: Vec<f64>, scale: Vec<f64>) -> Result<Self> {
        if shift.len() != scale.len() {
            return Err(Error::shape(format!(
                "affine shift has {} entries but scale has {}",
                shift.len(),
                scale.len()
            )));
        }
        if let Some(bad) = scale.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::argument(format!("affine scale entries must be finite and > 0, got {bad}")));
        }
        if shift.iter().any(|s| !s.is_finite()) {
            return Err(Error::argument("affine shift entries must be finite"));
        }
        Ok(Affine { shift, scale })
    }

    /// Same shift and scale for every feature.
    pub fn uniform(dim: usize, shift: f64, scale: f64) -> Result<Self> {
        Affine::new(vec![shift; dim], vec![scale; dim])
    }

    /// Per-feature mean and standard deviation of row-major samples. Features
    /// with (near) zero spread keep a unit scale.
    pub fn standardize(samples: &[f64], dim: usize) -> Result<Self> {
        if dim == 0 || samples.is_empty() || !samples.len().is_multiple_of(dim) {
            return Err(Error::shape("cannot fit normalization to an empty or ragged sample block"));
        }
        let n = (samples.len() / dim) as f64;
        let mut mean = vec![0.0; dim];
        for row in samples.chunks_exact(dim) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for row in samples.chunks_exact(dim) {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = libm::sqrt(s / n);
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Affine::new(mean, scale)
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn is_identity(&self) -> bool {
        self.shift.iter().all(|&s| s == 0.0) && self.scale.iter().all(|&s| s == 1.0)
    }

    #[inline]
    pub fn normalize_into(&self, raw: &[f64], out: &mut [f64]) {
        for i in 0..raw.len() {
            out[i] = (raw[i] - self.shift[i]) / self.scale[i];
        }
    }

    #[inline]
    pub fn denormalize_into(&self, normalized: &[f64], out: &mut [f64]) {
        for i in 0..normalized.len() {
            out[i] = normalized[i] * self.scale[i] + self.shift[i];
        }
    }

    pub fn normalize(&self, raw: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; raw.len()];
        self.normalize_into(raw, &mut out);
        out
    }

    pub fn denormalize(&self, normalized: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; normalized.len()];
        self.denormalize_into(normalized, &mut out);
        out
    }

    /// Normalizes a row-major block of samples in place.
    pub fn normalize_rows(&self, block: &mut [f64]) {
        let dim = self.dim();
        for row in block.chunks_exact_mut(dim) {
            for ((v, s), c) in row.iter_mut().zip(&self.shift).zip(&self.scale) {
                *v = (*v - s) / c;
            }
        }
    }
}

/// Ordered stack of dense layers between an input and an output normalization.
///
/// The layers operate in normalized units: `forward` maps a raw input through
/// `input_norm`, the layer chain, and the inverse of `output_norm`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
    input_norm: Affine,
    output_norm: Affine,
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        let (input, output) = check_chain(&layers)?;
        Ok(Network { layers, input_norm: Affine::identity(input), output_norm: Affine::identity(output) })
    }

    pub fn with_norms(layers: Vec<DenseLayer>, input_norm: Affine, output_norm: Affine) -> Result<Self> {
        let mut net = Network::new(layers)?;
        net.set_input_norm(input_norm)?;
        net.set_output_norm(output_norm)?;
        Ok(net)
    }

    /// Random Glorot-initialized network with the given widths. Every layer is
    /// sigmoid except the last, which is linear.
    pub fn glorot<R: rand::Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::shape("a network needs at least an input and an output width"));
        }
        let last = dims.len() - 2;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let act = if i == last { Activation::Linear } else { Activation::Sigmoid };
                DenseLayer::glorot(w[0], w[1], act, rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Network::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn into_layers(self) -> Vec<DenseLayer> {
        self.layers
    }

    pub fn input_norm(&self) -> &Affine {
        &self.input_norm
    }

    pub fn output_norm(&self) -> &Affine {
        &self.output_norm
    }

    pub fn set_input_norm(&mut self, norm: Affine) -> Result<()> {
        if norm.dim() != self.input_dim() {
            return Err(Error::shape(format!(
                "input normalization has {} features, network expects {}",
                norm.dim(),
                self.input_dim()
            )));
        }
        self.input_norm = norm;
        Ok(())
    }

    pub fn set_output_norm(&mut self, norm: Affine) -> Result<()> {
        if norm.dim() != self.output_dim() {
            return Err(Error::shape(format!(
                "output normalization has {} features, network emits {}",
                norm.dim(),
                self.output_dim()
            )));
        }
        self.output_norm = norm;
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    /// Widths `[input, hidden.., output]`.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_dim()];
        dims.extend(self.layers.iter().map(DenseLayer::out_dim));
        dims
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::parameter_count).sum()
    }

    /// Sum of squared weights (biases excluded).
    pub fn weight_energy(&self) -> f64 {
        self.layers.iter().flat_map(|l| l.weights()).map(|w| w * w).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::shape(format!("input has {} values, network expects {}", x.len(), self.input_dim())));
        }
        let a = self.input_norm.normalize(x);
        let z = self.forward_normalized_range(a, 0, self.layers.len())?;
        Ok(self.output_norm.denormalize(&z))
    }

    /// Runs layers `start..end` on a vector already in the network's internal units.
    pub fn forward_normalized_range(&self, mut a: Vec<f64>, start: usize, end: usize) -> Result<Vec<f64>> {
        if start > end || end > self.layers.len() {
            return Err(Error::argument(format!("layer range {start}..{end} out of bounds")));
        }
        if start < end && a.len() != self.layers[start].in_dim() {
            return Err(Error::shape(format!(
                "layer {start} expects {} values, got {}",
                self.layers[start].in_dim(),
                a.len()
            )));
        }
        for (idx, layer) in self.layers[start..end].iter().enumerate() {
            a = layer.forward(&a);
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!("non-finite activation after layer {}", start + idx)));
            }
        }
        Ok(a)
    }
}

fn check_chain(layers: &[DenseLayer]) -> Result<(usize, usize)> {
    let (Some(first), Some(last)) = (layers.first(), layers.last()) else {
        return Err(Error::shape("a network needs at least one layer"));
    };
    for (i, pair) in layers.windows(2).enumerate() {
        if pair[0].out_dim() != pair[1].in_dim() {
            return Err(Error::shape(format!(
                "layer {i} emits {} values but layer {} expects {}",
                pair[0].out_dim(),
                i + 1,
                pair[1].in_dim()
            )));
        }
    }
    Ok((first.in_dim(), last.out_dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    #[test]
    fn zero_sigmoid_layer_outputs_half() {
        let net = Network::new(vec![DenseLayer::zeros(3, 4, Activation::Sigmoid).unwrap()]).unwrap();
        assert_eq!(net.forward(&[1.0, -7.0, 2.5]).unwrap(), vec![0.5; 4]);
    }

    #[test]
    fn linear_identity_layer() {
        let layer = DenseLayer::from_parts(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0], Activation::Linear).unwrap();
        let net = Network::new(vec![layer]).unwrap();
        assert_eq!(net.forward(&[0.3, -1.2]).unwrap(), vec![0.3, -1.2]);
    }

    #[test]
    fn two_layer_hand_evaluation() {
        let l1 = DenseLayer::from_parts(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0], Activation::Sigmoid).unwrap();
        let l2 = DenseLayer::from_parts(2, 1, vec![1.0, 1.0], vec![0.0], Activation::Linear).unwrap();
        let net = Network::new(vec![l1, l2]).unwrap();
        // independent scalar evaluation
        let s = |u: f64| 1.0 / (1.0 + (-u).exp());
        let expected = s(0.0) + s(0.0);
        assert_eq!(net.forward(&[0.0, 0.0]).unwrap(), vec![expected]);
        assert_eq!(expected, 1.0);
    }

    #[test]
    fn dimension_mismatch_is_shape_error() {
        let net = Network::new(vec![DenseLayer::zeros(3, 1, Activation::Linear).unwrap()]).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(Error::Shape(_))));
        let bad = Network::new(vec![
            DenseLayer::zeros(3, 2, Activation::Sigmoid).unwrap(),
            DenseLayer::zeros(3, 1, Activation::Linear).unwrap(),
        ]);
        assert!(matches!(bad, Err(Error::Shape(_))));
    }

    #[test]
    fn overflow_is_numeric_error() {
        let layer = DenseLayer::from_parts(1, 1, vec![1e300], vec![0.0], Activation::Linear).unwrap();
        let net = Network::new(vec![layer.clone(), layer]).unwrap();
        assert!(matches!(net.forward(&[1e300]), Err(Error::Numeric(_))));
    }

    #[test]
    fn affine_rejects_nonpositive_scale() {
        assert!(Affine::new(vec![0.0], vec![0.0]).is_err());
        assert!(Affine::new(vec![0.0], vec![-1.0]).is_err());
        let a = Affine::new(vec![1.0, 2.0], vec![2.0, 4.0]).unwrap();
        let raw = [5.0, -6.0];
        assert_eq!(a.denormalize(&a.normalize(&raw)), raw.to_vec());
    }

    #[test]
    fn norms_apply_around_layers() {
        let layer = DenseLayer::from_parts(1, 1, vec![1.0], vec![0.0], Activation::Linear).unwrap();
        let net = Network::with_norms(
            vec![layer],
            Affine::new(vec![10.0], vec![2.0]).unwrap(),
            Affine::new(vec![-1.0], vec![3.0]).unwrap(),
        )
        .unwrap();
        // (14 - 10) / 2 = 2 -> 2 * 3 - 1 = 5
        assert_eq!(net.forward(&[14.0]).unwrap(), vec![5.0]);
    }
}
