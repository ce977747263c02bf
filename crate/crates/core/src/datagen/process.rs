use alloc::vec::Vec;

use rand::seq::index;

use super::{noise, uniform, NoiseMode};
use crate::nn::SampleSet;
use crate::{derive_seed, Error, Result};

pub const PROCESS_POINTS: usize = 20;

/// Two-parameter process `x(t) = t z sin(theta) + (t^2 / z) cos(theta)` sampled
/// at `t = 0.05, 0.10, .., 1.0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessModelParams {
    pub z: f64,
    /// Radians.
    pub theta: f64,
}

impl ProcessModelParams {
    pub const Z_RANGE: (f64, f64) = (0.5, 4.0);
    pub const THETA_RANGE: (f64, f64) = (0.3, 1.3);

    pub fn in_range(&self) -> bool {
        (Self::Z_RANGE.0..=Self::Z_RANGE.1).contains(&self.z)
            && (Self::THETA_RANGE.0..=Self::THETA_RANGE.1).contains(&self.theta)
    }

    pub fn sample<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        ProcessModelParams {
            z: uniform(rng, Self::Z_RANGE.0, Self::Z_RANGE.1),
            theta: uniform(rng, Self::THETA_RANGE.0, Self::THETA_RANGE.1),
        }
    }
}

pub fn t_grid() -> [f64; PROCESS_POINTS] {
    core::array::from_fn(|i| (i + 1) as f64 * 0.05)
}

pub fn process_model(p: ProcessModelParams) -> [f64; PROCESS_POINTS] {
    let (s, c) = (libm::sin(p.theta), libm::cos(p.theta));
    t_grid().map(|t| t * p.z * s + (t * t / p.z) * c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MathDatasetConfig {
    pub count: usize,
    /// Share of samples that receive noise; the rest train as clean pairs.
    pub noisy_fraction: f64,
    /// Per-sample noise level is drawn from `[min_level, max_level]`.
    pub min_level: f64,
    pub max_level: f64,
}

impl MathDatasetConfig {
    /// Training set: half the samples noisy with up to 25% noise.
    pub fn training(count: usize) -> Self {
        MathDatasetConfig { count, noisy_fraction: 0.5, min_level: 0.25, max_level: 0.25 }
    }

    /// Test set: every sample noisy, level between 10% and 25%.
    pub fn test(count: usize) -> Self {
        MathDatasetConfig { count, noisy_fraction: 1.0, min_level: 0.10, max_level: 0.25 }
    }
}

/// Picks exactly `round(fraction * count)` noisy indices; noisy samples
/// alternate between local and mean scaling so each mode gets half.
pub(crate) fn noisy_plan(count: usize, fraction: f64, seed: u64) -> Vec<Option<NoiseMode>> {
    let noisy = (libm::round(fraction.clamp(0.0, 1.0) * count as f64) as usize).min(count);
    let mut plan = alloc::vec![None; count];
    let mut rng = crate::rng_from_seed(derive_seed(seed, u64::MAX));
    let mut picked = index::sample(&mut rng, count, noisy).into_vec();
    picked.sort_unstable();
    for (ordinal, i) in picked.into_iter().enumerate() {
        plan[i] = Some(if ordinal % 2 == 0 { NoiseMode::LocalScale } else { NoiseMode::MeanScale });
    }
    plan
}

pub fn math_dataset(config: &MathDatasetConfig, seed: u64) -> Result<SampleSet> {
    if !(0.0..=config.max_level).contains(&config.min_level) {
        return Err(Error::argument("noise levels must satisfy 0 <= min_level <= max_level"));
    }
    let mut set = SampleSet::new(PROCESS_POINTS);
    for (i, mode) in noisy_plan(config.count, config.noisy_fraction, seed).into_iter().enumerate() {
        let mut rng = crate::rng_from_seed(derive_seed(seed, i as u64));
        let clean = process_model(ProcessModelParams::sample(&mut rng));
        match mode {
            Some(mode) => {
                let level = uniform(&mut rng, config.min_level, config.max_level);
                let noisy = noise::add_random_noise_with(&clean, level, mode, &mut rng);
                set.push(&clean, &noisy, true)?;
            }
            None => set.push(&clean, &clean, false)?,
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_twenty_points() {
        let t = t_grid();
        assert_eq!(t.len(), 20);
        assert!((t[0] - 0.05).abs() < 1e-15 && (t[19] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn limiting_cases() {
        let x = process_model(ProcessModelParams { z: 1.0, theta: 0.0 });
        assert!((x[19] - 1.0).abs() < 1e-15);
        let x = process_model(ProcessModelParams { z: 4.0, theta: core::f64::consts::FRAC_PI_2 });
        assert!((x[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn scalar_evaluation() {
        // t = 0.5 is grid index 9
        let x = process_model(ProcessModelParams { z: 2.0, theta: 0.5 });
        let expected = 0.5 * 2.0 * 0.5f64.sin() + (0.25 / 2.0) * 0.5f64.cos();
        assert!((x[9] - expected).abs() < 1e-15);
        assert!((x[9] - 0.5891).abs() < 5e-5);
    }

    #[test]
    fn dataset_noise_split() {
        let set = math_dataset(&MathDatasetConfig::training(2000), 3).unwrap();
        assert_eq!(set.len(), 2000);
        assert_eq!(set.noisy_count(), 1000);
        for i in 0..set.len() {
            if !set.is_noisy(i) {
                assert_eq!(set.clean(i), set.corrupted(i));
            }
        }
    }
}
