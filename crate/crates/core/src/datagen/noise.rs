use alloc::vec::Vec;

use rand::Rng;

use super::uniform;

/// How the amplitude of uniform random noise is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// `x_i (1 + u_i)`: proportional to the local value.
    LocalScale,
    /// `x_i + mean(|x|) u_i`: proportional to the sample's mean magnitude.
    MeanScale,
}

/// Adds uniform noise `u_i ~ U[-level, level]` to every point.
pub fn add_random_noise(x: &[f64], level: f64, mode: NoiseMode, seed: u64) -> Vec<f64> {
    add_random_noise_with(x, level, mode, &mut crate::rng_from_seed(seed))
}

pub fn add_random_noise_with<R: Rng + ?Sized>(x: &[f64], level: f64, mode: NoiseMode, rng: &mut R) -> Vec<f64> {
    let all: Vec<usize> = (0..x.len()).collect();
    add_noise_at(x, &all, level, mode, rng)
}

/// Adds noise only at `points`; other entries are copied unchanged.
pub fn add_noise_at<R: Rng + ?Sized>(
    x: &[f64],
    points: &[usize],
    level: f64,
    mode: NoiseMode,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = x.to_vec();
    if level == 0.0 {
        return out;
    }
    let mean_abs = if x.is_empty() { 0.0 } else { x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64 };
    for &i in points {
        let u = uniform(rng, -level, level);
        out[i] = match mode {
            NoiseMode::LocalScale => x[i] * (1.0 + u),
            NoiseMode::MeanScale => x[i] + mean_abs * u,
        };
    }
    out
}
