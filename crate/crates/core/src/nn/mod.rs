//! Dense feed-forward networks trained by backpropagation and plain
//! mini-batch gradient descent with per-layer L2 weight decay.

mod backprop;
mod data;
pub mod gradcheck;
mod kernels;
mod layer;
mod network;
mod sparsity;
mod train;

pub use backprop::{backprop, batch_gradients, forward_batch, BatchLoss, Gradients, LayerGradient, Workspace};
pub use data::SampleSet;
pub use layer::{sigmoid, Activation, DenseLayer};
pub use network::{Affine, Network};
pub use sparsity::{kl_bernoulli, sparsity_penalty, Sparsity, SparsityPenalty};
pub use train::{evaluate_loss, loss_mse, sgd_step, train, EpochLoss, LossHistory, TrainSpec};

/// Runs `net` on every row of a raw row-major input block, returning raw outputs.
pub fn predict_block(net: &Network, inputs: &[f64]) -> crate::Result<alloc::vec::Vec<f64>> {
    let in_dim = net.input_dim();
    if !inputs.len().is_multiple_of(in_dim) {
        return Err(crate::Error::shape("input block is not a whole number of samples"));
    }
    let mut normalized = inputs.to_vec();
    net.input_norm().normalize_rows(&mut normalized);
    let mut ws = Workspace::new();
    let out_dim = net.output_dim();
    let mut out = alloc::vec::Vec::with_capacity(inputs.len() / in_dim * out_dim);
    for chunk in normalized.chunks(256 * in_dim) {
        forward_batch(net, chunk, &mut ws);
        for row in ws.output().chunks_exact(out_dim) {
            let raw = net.output_norm().denormalize(row);
            if raw.iter().any(|v| !v.is_finite()) {
                return Err(crate::Error::Numeric(alloc::string::String::from("non-finite network output")));
            }
            out.extend_from_slice(&raw);
        }
    }
    Ok(out)
}
