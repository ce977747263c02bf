use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::backprop::{batch_gradients, check_sparsity_layer, forward_batch, Gradients, Workspace};
use super::data::SampleSet;
use super::network::Network;
use super::sparsity::Sparsity;
use crate::{Error, Result};

/// Optimizer and loop settings for one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSpec {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub batch_size: usize,
    /// One coefficient per weight matrix; empty means no regularization.
    pub l2_lambda: Vec<f64>,
    pub sparsity: Option<Sparsity>,
    pub seed: u64,
    /// Stop after this many epochs without a validation improvement; 0 disables.
    pub early_stop_patience: usize,
}

impl Default for TrainSpec {
    fn default() -> Self {
        TrainSpec {
            learning_rate: 0.05,
            max_epochs: 1000,
            batch_size: 64,
            l2_lambda: Vec::new(),
            sparsity: None,
            seed: 0,
            early_stop_patience: 200,
        }
    }
}

impl TrainSpec {
    pub fn validate(&self, net: &Network) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::argument(format!("learning rate must be finite and >= 0, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::argument("batch size must be >= 1"));
        }
        if !self.l2_lambda.is_empty() && self.l2_lambda.len() != net.layers().len() {
            return Err(Error::argument(format!(
                "{} L2 coefficients given for {} layers",
                self.l2_lambda.len(),
                net.layers().len()
            )));
        }
        if self.l2_lambda.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
            return Err(Error::argument("L2 coefficients must be finite and >= 0"));
        }
        if let Some(sp) = &self.sparsity {
            check_sparsity_layer(net, sp)?;
        }
        Ok(())
    }

    pub fn lambda(&self, layer: usize) -> f64 {
        self.l2_lambda.get(layer).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLoss {
    /// Mean reconstruction loss over the epoch's mini-batches.
    pub train: f64,
    /// Reconstruction loss on the validation set after the epoch.
    pub valid: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossHistory {
    /// Validation loss of the network before the first update.
    pub initial_valid: Option<f64>,
    pub epochs: Vec<EpochLoss>,
    /// Epoch (0-based) whose network was returned; `None` if no epoch improved
    /// on the starting network.
    pub best_epoch: Option<usize>,
    /// Whether any batch had a sparsity mean clamped.
    pub sparsity_clamped: bool,
}

impl LossHistory {
    pub fn best_valid(&self) -> Option<f64> {
        self.best_epoch.map(|e| self.epochs[e].valid)
    }
}

/// `sum_s |x_s - z_s|^2 / N_s` over two equally shaped batches.
pub fn loss_mse<A: AsRef<[f64]>, B: AsRef<[f64]>>(clean: &[A], output: &[B]) -> Result<f64> {
    if clean.is_empty() {
        return Err(Error::argument("loss of an empty batch"));
    }
    if clean.len() != output.len() {
        return Err(Error::shape(format!("batches have {} and {} samples", clean.len(), output.len())));
    }
    let mut total = 0.0;
    for (x, z) in clean.iter().zip(output) {
        let (x, z) = (x.as_ref(), z.as_ref());
        if x.len() != z.len() {
            return Err(Error::shape(format!("sample lengths {} and {} differ", x.len(), z.len())));
        }
        total += x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    Ok(total / clean.len() as f64)
}

/// One plain gradient-descent update: `w -= lr (g + lambda w)`, `b -= lr g_b`.
pub fn sgd_step(net: &mut Network, grads: &Gradients, learning_rate: f64, l2_lambda: &[f64]) -> Result<()> {
    if !grads.matches(net) {
        return Err(Error::shape("gradient shapes do not match the network"));
    }
    for (l, (layer, g)) in net.layers_mut().iter_mut().zip(&grads.layers).enumerate() {
        let lambda = l2_lambda.get(l).copied().unwrap_or(0.0);
        for (w, gw) in layer.weights_mut().iter_mut().zip(&g.weights) {
            *w -= learning_rate * (gw + lambda * *w);
        }
        for (b, gb) in layer.biases_mut().iter_mut().zip(&g.biases) {
            *b -= learning_rate * gb;
        }
    }
    Ok(())
}

/// Normalized input/target blocks in the units the layers see.
struct Prepared {
    inputs: Vec<f64>,
    targets: Vec<f64>,
    len: usize,
}

fn prepare(net: &Network, set: &SampleSet) -> Prepared {
    let mut inputs = set.corrupted_block().to_vec();
    let mut targets = set.clean_block().to_vec();
    net.input_norm().normalize_rows(&mut inputs);
    net.output_norm().normalize_rows(&mut targets);
    Prepared { inputs, targets, len: set.len() }
}

const EVAL_CHUNK: usize = 256;

fn mean_loss(net: &Network, data: &Prepared, ws: &mut Workspace) -> f64 {
    let (in_dim, out_dim) = (net.input_dim(), net.output_dim());
    let mut total = 0.0;
    let mut start = 0;
    while start < data.len {
        let end = (start + EVAL_CHUNK).min(data.len);
        forward_batch(net, &data.inputs[start * in_dim..end * in_dim], ws);
        let t = &data.targets[start * out_dim..end * out_dim];
        total += ws.output().iter().zip(t).map(|(z, x)| (z - x) * (z - x)).sum::<f64>();
        start = end;
    }
    total / data.len as f64
}

/// Mean per-sample squared error of `net` on `set`, in normalized units.
pub fn evaluate_loss(net: &Network, set: &SampleSet) -> Result<f64> {
    check_dims(net, set)?;
    if set.is_empty() {
        return Err(Error::argument("loss of an empty sample set"));
    }
    Ok(mean_loss(net, &prepare(net, set), &mut Workspace::new()))
}

fn check_dims(net: &Network, set: &SampleSet) -> Result<()> {
    if set.dim() != net.input_dim() || set.dim() != net.output_dim() {
        return Err(Error::shape(format!(
            "samples of dim {} do not fit a {}->{} network",
            set.dim(),
            net.input_dim(),
            net.output_dim()
        )));
    }
    Ok(())
}

/// Mini-batch gradient descent on `corrupted -> clean` pairs.
///
/// Runs until `max_epochs` or until validation loss has not improved for
/// `early_stop_patience` epochs, and returns the network with the best
/// validation loss seen (the starting network if nothing improved on it).
pub fn train(net: &Network, train: &SampleSet, valid: &SampleSet, spec: &TrainSpec) -> Result<(Network, LossHistory)> {
    if spec.max_epochs == 0 {
        return Ok((net.clone(), LossHistory::default()));
    }
    spec.validate(net)?;
    check_dims(net, train)?;
    check_dims(net, valid)?;
    if train.is_empty() || valid.is_empty() {
        return Err(Error::argument("training and validation sets must be nonempty"));
    }

    let (in_dim, out_dim) = (net.input_dim(), net.output_dim());
    let tr = prepare(net, train);
    let va = prepare(net, valid);
    let mut ws = Workspace::new();
    let mut grads = Gradients::zeros_like(net);
    let mut rng = crate::rng_from_seed(spec.seed);
    let mut order: Vec<usize> = (0..tr.len).collect();
    let batch = spec.batch_size.min(tr.len);
    let mut xb = vec![0.0; batch * in_dim];
    let mut tb = vec![0.0; batch * out_dim];

    let mut current = net.clone();
    let initial = mean_loss(&current, &va, &mut ws);
    if !initial.is_finite() {
        return Err(Error::Diverged { epoch: 0, loss: initial });
    }
    let mut best = (initial, current.clone());
    let mut history = LossHistory { initial_valid: Some(initial), ..LossHistory::default() };
    let mut since_best = 0;

    for epoch in 0..spec.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(batch) {
            let n = chunk.len();
            for (k, &i) in chunk.iter().enumerate() {
                xb[k * in_dim..(k + 1) * in_dim].copy_from_slice(&tr.inputs[i * in_dim..(i + 1) * in_dim]);
                tb[k * out_dim..(k + 1) * out_dim].copy_from_slice(&tr.targets[i * out_dim..(i + 1) * out_dim]);
            }
            let loss = batch_gradients(
                &current,
                &xb[..n * in_dim],
                &tb[..n * out_dim],
                spec.sparsity.as_ref(),
                &mut ws,
                &mut grads,
            )?;
            if !loss.total().is_finite() {
                return Err(Error::Diverged { epoch, loss: loss.total() });
            }
            history.sparsity_clamped |= loss.clamped;
            sgd_step(&mut current, &grads, spec.learning_rate, &spec.l2_lambda)?;
            epoch_loss += loss.reconstruction;
            batches += 1;
        }
        let valid_loss = mean_loss(&current, &va, &mut ws);
        if !valid_loss.is_finite() {
            return Err(Error::Diverged { epoch, loss: valid_loss });
        }
        history.epochs.push(EpochLoss { train: epoch_loss / batches as f64, valid: valid_loss });
        if valid_loss < best.0 {
            best = (valid_loss, current.clone());
            history.best_epoch = Some(epoch);
            since_best = 0;
        } else {
            since_best += 1;
            if spec.early_stop_patience > 0 && since_best >= spec.early_stop_patience {
                break;
            }
        }
    }
    Ok((best.1, history))
}
