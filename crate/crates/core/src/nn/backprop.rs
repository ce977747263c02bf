use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::kernels;
use super::layer::Activation;
use super::network::Network;
use super::sparsity::{sparsity_penalty, Sparsity};
use crate::{Error, Result};

/// Gradient of one layer, same layout as the layer's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Gradients for every layer of a network, in layer order.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Gradients {
            layers: net
                .layers()
                .iter()
                .map(|l| LayerGradient { weights: vec![0.0; l.weights().len()], biases: vec![0.0; l.out_dim()] })
                .collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        for g in &mut self.layers {
            g.weights.fill(0.0);
            g.biases.fill(0.0);
        }
    }

    pub fn matches(&self, net: &Network) -> bool {
        self.layers.len() == net.layers().len()
            && self
                .layers
                .iter()
                .zip(net.layers())
                .all(|(g, l)| g.weights.len() == l.weights().len() && g.biases.len() == l.out_dim())
    }

    /// All entries flattened: per layer, weights then biases.
    pub fn flatten(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|g| g.weights.iter().chain(&g.biases).copied()).collect()
    }
}

/// Loss components of one mini-batch, in normalized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchLoss {
    /// Mean per-sample squared error.
    pub reconstruction: f64,
    /// Sparsity penalty (0 when disabled).
    pub penalty: f64,
    pub clamped: bool,
}

impl BatchLoss {
    pub fn total(&self) -> f64 {
        self.reconstruction + self.penalty
    }
}

/// Reusable activation and delta buffers for batched passes.
#[derive(Debug, Default)]
pub struct Workspace {
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    prev: Vec<f64>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    fn prepare(&mut self, net: &Network, batch: usize) {
        let dims = net.dims();
        self.acts.resize_with(dims.len(), Vec::new);
        for (buf, d) in self.acts.iter_mut().zip(&dims) {
            buf.resize(batch * d, 0.0);
        }
    }

    /// Output of the last batched forward pass.
    pub fn output(&self) -> &[f64] {
        self.acts.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Activations after layer `layer` from the last batched forward pass.
    pub fn activations(&self, layer: usize) -> &[f64] {
        &self.acts[layer + 1]
    }
}

/// Batched forward pass on normalized inputs; results stay in `ws`.
pub fn forward_batch(net: &Network, inputs: &[f64], ws: &mut Workspace) {
    let in_dim = net.input_dim();
    let batch = inputs.len() / in_dim;
    ws.prepare(net, batch);
    ws.acts[0].copy_from_slice(inputs);
    for (l, layer) in net.layers().iter().enumerate() {
        let (head, tail) = ws.acts.split_at_mut(l + 1);
        let input = &head[l];
        let out = &mut tail[0];
        kernels::affine_batch(layer.weights(), layer.biases(), layer.in_dim(), input, out);
        if layer.activation() == Activation::Sigmoid {
            for v in out.iter_mut() {
                *v = super::layer::sigmoid(*v);
            }
        }
    }
}

/// Accumulates into `grads` the gradient of the mean batch loss
/// `(1/B) sum_s |z_s - t_s|^2 (+ sparsity penalty)` and returns the loss.
///
/// `inputs` and `targets` are row-major batches in normalized units. `grads`
/// is zeroed first.
pub fn batch_gradients(
    net: &Network,
    inputs: &[f64],
    targets: &[f64],
    sparsity: Option<&Sparsity>,
    ws: &mut Workspace,
    grads: &mut Gradients,
) -> Result<BatchLoss> {
    let in_dim = net.input_dim();
    let out_dim = net.output_dim();
    if inputs.is_empty() || !inputs.len().is_multiple_of(in_dim) {
        return Err(Error::shape(format!("input batch of {} values is not a multiple of {in_dim}", inputs.len())));
    }
    let batch = inputs.len() / in_dim;
    if targets.len() != batch * out_dim {
        return Err(Error::shape(format!("target batch has {} values, expected {}", targets.len(), batch * out_dim)));
    }
    if !grads.matches(net) {
        return Err(Error::shape("gradient buffers do not match the network"));
    }
    if let Some(sp) = sparsity {
        check_sparsity_layer(net, sp)?;
    }
    grads.fill_zero();
    forward_batch(net, inputs, ws);

    let layers = net.layers();
    let n_layers = layers.len();
    let scale = 2.0 / batch as f64;
    let mut sq = 0.0;
    ws.delta.clear();
    {
        let out = &ws.acts[n_layers];
        let act = layers[n_layers - 1].activation();
        for s in 0..batch {
            let mut row_sq = 0.0;
            for o in 0..out_dim {
                let z = out[s * out_dim + o];
                let r = z - targets[s * out_dim + o];
                row_sq += r * r;
                ws.delta.push(scale * r * act.derivative_from_output(z));
            }
            sq += row_sq;
        }
    }
    let mut loss = BatchLoss { reconstruction: sq / batch as f64, penalty: 0.0, clamped: false };

    for l in (0..n_layers).rev() {
        let layer = &layers[l];
        let g = &mut grads.layers[l];
        kernels::accumulate_grads(
            &ws.delta,
            &ws.acts[l],
            layer.in_dim(),
            layer.out_dim(),
            &mut g.weights,
            &mut g.biases,
        );
        if l == 0 {
            break;
        }
        ws.prev.resize(batch * layer.in_dim(), 0.0);
        kernels::propagate_delta(&ws.delta, layer.weights(), layer.in_dim(), layer.out_dim(), &mut ws.prev);
        let below = &layers[l - 1];
        let a = &ws.acts[l];
        if let Some(sp) = sparsity.filter(|sp| sp.layer == l - 1 && sp.weight > 0.0) {
            let p = sparsity_penalty(a, below.out_dim(), sp.target, sp.weight)?;
            for (d, g) in ws.prev.iter_mut().zip(&p.gradient) {
                *d += g;
            }
            loss.penalty = p.value;
            loss.clamped = p.clamped;
        }
        let act = below.activation();
        for (d, &av) in ws.prev.iter_mut().zip(a.iter()) {
            *d *= act.derivative_from_output(av);
        }
        core::mem::swap(&mut ws.delta, &mut ws.prev);
    }
    Ok(loss)
}

pub(crate) fn check_sparsity_layer(net: &Network, sp: &Sparsity) -> Result<()> {
    sp.validate()?;
    match net.layers().get(sp.layer) {
        Some(l) if sp.layer + 1 < net.layers().len() && l.activation() == Activation::Sigmoid => Ok(()),
        _ => Err(Error::argument(format!("sparsity layer {} is not a hidden sigmoid layer", sp.layer))),
    }
}

/// Gradient of the single-sample squared error `|z - t|^2` with respect to
/// every weight and bias.
///
/// `x` and `target` are raw values; the error is measured after mapping the
/// target through the network's output normalization, i.e. in the units the
/// layers are trained in. With identity normalizations this is the plain
/// squared error of `forward(x)`.
pub fn backprop(net: &Network, x: &[f64], target: &[f64]) -> Result<Gradients> {
    if x.len() != net.input_dim() || target.len() != net.output_dim() {
        return Err(Error::shape(format!(
            "backprop expects {} inputs and {} targets, got {} and {}",
            net.input_dim(),
            net.output_dim(),
            x.len(),
            target.len()
        )));
    }
    let xn = net.input_norm().normalize(x);
    let tn = net.output_norm().normalize(target);
    let mut ws = Workspace::new();
    let mut grads = Gradients::zeros_like(net);
    batch_gradients(net, &xn, &tn, None, &mut ws, &mut grads)?;
    Ok(grads)
}
