//! Dense feed-forward networks and stacked denoising autoencoders for
//! geophysical signals.
//!
//! Everything in this crate is pure computation over `alloc` buffers: no IO,
//! no threads, no global state. Randomness is always driven by an explicit
//! seed so that every routine is reproducible bit-for-bit.
//!
//! Layout:
//!
//! - [`nn`]: dense layers, forward/backward passes, SGD with L2, training loop
//!   and the finite-difference gradient audit.
//! - [`autoencoder`]: denoising autoencoder construction, encode/decode and the
//!   KL sparsity penalty.
//! - [`stacked`]: recursive single-hidden-layer pretraining, assembly, weight
//!   perturbation and fine-tuning.
//! - [`datagen`]: forward models (process model, self-potential anomaly,
//!   synthetic seismic, velocity-porosity transform, well logs) and noise
//!   injectors.
//! - [`windowing`]: sliding-window patch extraction and coverage-averaged
//!   recombination.
//! - [`metrics`]: noise-reduction efficiency and region-split error reports.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod autoencoder;
pub mod datagen;
mod error;
mod matrix;
pub mod metrics;
pub mod nn;
pub mod stacked;
pub mod windowing;

pub use error::{Error, Result};
pub use matrix::Matrix;

/// Deterministic generator used everywhere a seed is accepted.
pub type SeedRng = rand_chacha::ChaCha8Rng;

/// Builds the crate-wide RNG from a seed.
pub fn rng_from_seed(seed: u64) -> SeedRng {
    use rand::SeedableRng;
    SeedRng::seed_from_u64(seed)
}

/// Derives an independent per-item seed (per sample, per stage, ...) from a
/// base seed. SplitMix64 finalizer over `seed ^ index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = (seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `ceil(fraction * n)` clamped to `0..=n`, tolerant of representation error
/// in `fraction` (so `0.1 * 100` is 10, not 11).
pub fn ceil_count(fraction: f64, n: usize) -> usize {
    let raw = fraction * n as f64;
    (libm::ceil(raw - 1e-9 * raw.abs().max(1.0)).max(0.0) as usize).min(n)
}
