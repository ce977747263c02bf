//! Two-step stacked training of a deep symmetric autoencoder.
//!
//! Step 1 trains one single-hidden-layer autoencoder per depth level, from
//! the outermost hidden layer inwards: the first maps corrupted inputs to clean
//! targets, each later one reconstructs the hidden codes produced by the
//! level before it. Step 2 stacks the learned encoders and decoders into the
//! full network and trains it end to end.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, Uniform};
use rand::seq::index;

use crate::autoencoder;
use crate::nn::{self, Activation, DenseLayer, LossHistory, Network, SampleSet, TrainSpec};
use crate::{derive_seed, Error, Result};

/// Random multiplicative weight perturbation applied between assembly and
/// fine-tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    /// Share of each layer's weights that gets perturbed.
    pub fraction: f64,
    /// Largest relative change, `w <- w (1 + u)` with `|u| <= magnitude`.
    pub magnitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackPlan {
    /// Hidden widths of the full network; odd length.
    pub hidden_dims: Vec<usize>,
    /// One spec per pretraining stage, `(n + 1) / 2` of them.
    pub stage_specs: Vec<TrainSpec>,
    pub finetune: TrainSpec,
    pub perturb: Option<Perturbation>,
}

impl StackPlan {
    pub fn stage_count(&self) -> usize {
        self.hidden_dims.len().div_ceil(2)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.hidden_dims.len();
        if n == 0 || n.is_multiple_of(2) {
            return Err(Error::argument(format!("stacked training needs an odd number of hidden layers, got {n}")));
        }
        if self.hidden_dims.contains(&0) {
            return Err(Error::argument("hidden widths must be >= 1"));
        }
        if self.stage_specs.len() != self.stage_count() {
            return Err(Error::argument(format!(
                "{} stage specs given, {} hidden layers need {}",
                self.stage_specs.len(),
                n,
                self.stage_count()
            )));
        }
        if let Some(p) = &self.perturb {
            if !(p.fraction >= 0.0 && p.fraction <= 1.0) || !(p.magnitude >= 0.0 && p.magnitude.is_finite()) {
                return Err(Error::argument("perturbation fraction must be in [0,1] and magnitude >= 0"));
            }
        }
        Ok(())
    }
}

/// Output of one pretraining stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    /// 1-based depth level.
    pub index: usize,
    /// Two-layer autoencoder: layer 0 is the encoder `theta_k`, layer 1 the decoder `theta'_k`.
    pub network: Network,
    /// Hidden codes of the training inputs, row-major.
    pub representations: Vec<f64>,
    pub history: LossHistory,
}

impl StageResult {
    pub fn encoder(&self) -> &DenseLayer {
        &self.network.layers()[0]
    }

    pub fn decoder(&self) -> &DenseLayer {
        &self.network.layers()[1]
    }

    pub fn width(&self) -> usize {
        self.encoder().out_dim()
    }
}

fn hidden_codes(net: &Network, inputs: &[f64], normalize: bool) -> Result<Vec<f64>> {
    let encoder = Network::new(vec![net.layers()[0].clone()])?;
    let mut block = inputs.to_vec();
    if normalize {
        net.input_norm().normalize_rows(&mut block);
    }
    nn::predict_block(&encoder, &block)
}

/// Step 1: trains the `(n + 1) / 2` single-hidden-layer autoencoders.
///
/// `template` supplies input/output widths and normalizations for the first
/// stage; its weights are not used. Stage `k` is initialized from
/// `derive_seed(init_seed, k)`.
pub fn pretrain(
    plan: &StackPlan,
    template: &Network,
    train: &SampleSet,
    valid: &SampleSet,
    init_seed: u64,
) -> Result<Vec<StageResult>> {
    plan.validate()?;
    let dim = template.input_dim();
    if train.dim() != dim || valid.dim() != dim || template.output_dim() != dim {
        return Err(Error::shape(format!("samples of dim {} do not fit a {dim}-wide stack", train.dim())));
    }
    let mut stages: Vec<StageResult> = Vec::with_capacity(plan.stage_count());
    let mut valid_codes = Vec::new();
    for k in 0..plan.stage_count() {
        let width = plan.hidden_dims[k];
        let wrap = |e: Error| Error::Stage { stage: k + 1, source: alloc::boxed::Box::new(e) };
        let mut rng = crate::rng_from_seed(derive_seed(init_seed, k as u64 + 1));
        let (net, tr, va, normalize) = if k == 0 {
            let layers = vec![
                DenseLayer::glorot(dim, width, Activation::Sigmoid, &mut rng).map_err(wrap)?,
                DenseLayer::glorot(width, dim, Activation::Linear, &mut rng).map_err(wrap)?,
            ];
            let net = Network::with_norms(layers, template.input_norm().clone(), template.output_norm().clone())
                .map_err(wrap)?;
            (net, train.with_clean_pairs_enforced(), valid.with_clean_pairs_enforced(), true)
        } else {
            let prev = &stages[k - 1];
            let in_w = prev.width();
            let layers = vec![
                DenseLayer::glorot(in_w, width, Activation::Sigmoid, &mut rng).map_err(wrap)?,
                DenseLayer::glorot(width, in_w, Activation::Sigmoid, &mut rng).map_err(wrap)?,
            ];
            let net = Network::new(layers).map_err(wrap)?;
            let tr = SampleSet::identity(in_w, prev.representations.clone()).map_err(wrap)?;
            let va = SampleSet::identity(in_w, valid_codes.clone()).map_err(wrap)?;
            (net, tr, va, false)
        };
        let (trained, history) = nn::train(&net, &tr, &va, &plan.stage_specs[k]).map_err(wrap)?;
        let representations = hidden_codes(&trained, tr.corrupted_block(), normalize).map_err(wrap)?;
        valid_codes = hidden_codes(&trained, va.corrupted_block(), normalize).map_err(wrap)?;
        stages.push(StageResult { index: k + 1, network: trained, representations, history });
    }
    Ok(stages)
}

/// Step 2 set-up: stacks `theta_1 .. theta_m, theta'_m .. theta'_1` into one
/// network, every layer sigmoid except the linear output.
pub fn assemble(plan: &StackPlan, stages: &[StageResult]) -> Result<Network> {
    if stages.len() != plan.stage_count() {
        return Err(Error::Assembly(format!("{} stages given, plan needs {}", stages.len(), plan.stage_count())));
    }
    let mut layers: Vec<DenseLayer> = stages.iter().map(|s| s.encoder().clone()).collect();
    layers.extend(stages.iter().rev().map(|s| s.decoder().clone()));
    let last = layers.len() - 1;
    for (i, l) in layers.iter_mut().enumerate() {
        l.set_activation(if i == last { Activation::Linear } else { Activation::Sigmoid });
    }
    let first = &stages[0].network;
    let net = Network::with_norms(layers, first.input_norm().clone(), first.output_norm().clone())
        .map_err(|e| Error::Assembly(format!("{e}")))?;
    let expected: Vec<usize> = plan.hidden_dims.clone();
    let got = &net.dims()[1..net.dims().len() - 1];
    if got != expected.as_slice() {
        return Err(Error::Assembly(format!("assembled hidden widths {got:?} differ from plan {expected:?}")));
    }
    Ok(net)
}

/// Multiplies `ceil(fraction * count)` randomly chosen weights of every layer
/// by `1 + u`, `u ~ U[-magnitude, magnitude]`. Biases are left alone.
pub fn perturb_weights(net: &Network, fraction: f64, magnitude: f64, seed: u64) -> Result<Network> {
    if !(0.0..=1.0).contains(&fraction) || !(magnitude >= 0.0 && magnitude.is_finite()) {
        return Err(Error::argument("perturbation fraction must be in [0,1] and magnitude >= 0"));
    }
    let mut out = net.clone();
    if fraction == 0.0 || magnitude == 0.0 {
        return Ok(out);
    }
    let mut rng = crate::rng_from_seed(seed);
    let dist = Uniform::new_inclusive(-magnitude, magnitude);
    for layer in out.layers_mut() {
        let count = layer.weights().len();
        let picks = crate::ceil_count(fraction, count);
        let chosen = index::sample(&mut rng, count, picks);
        let weights = layer.weights_mut();
        for i in chosen.iter() {
            weights[i] *= 1.0 + dist.sample(&mut rng);
        }
    }
    Ok(out)
}

/// Step 2: trains the assembled network end to end on `corrupted -> clean`.
pub fn finetune(
    net: &Network,
    train: &SampleSet,
    valid: &SampleSet,
    spec: &TrainSpec,
) -> Result<(Network, LossHistory)> {
    autoencoder::train_denoiser(net, train, valid, spec)
}

#[derive(Debug, Clone)]
pub struct StackedOutcome {
    pub stages: Vec<StageResult>,
    /// Network right after assembly (and perturbation, if planned).
    pub initial: Network,
    pub network: Network,
    pub history: LossHistory,
}

/// Pretrain, assemble, optionally perturb, then fine-tune.
pub fn train_stacked(
    plan: &StackPlan,
    template: &Network,
    train: &SampleSet,
    valid: &SampleSet,
    init_seed: u64,
) -> Result<StackedOutcome> {
    let stages = pretrain(plan, template, train, valid, init_seed)?;
    let mut initial = assemble(plan, &stages)?;
    if let Some(p) = &plan.perturb {
        initial = perturb_weights(&initial, p.fraction, p.magnitude, p.seed)?;
    }
    let (network, history) = finetune(&initial, train, valid, &plan.finetune)?;
    Ok(StackedOutcome { stages, initial, network, history })
}
