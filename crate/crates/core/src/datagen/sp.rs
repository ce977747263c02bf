use alloc::vec::Vec;

use rand::seq::index;

use super::process::noisy_plan;
use super::{noise, uniform};
use crate::nn::SampleSet;
use crate::{derive_seed, Result};

pub const SP_POINTS: usize = 17;

/// Source parameters of the self-potential anomaly over a buried polarized body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpParams {
    /// Depth, m.
    pub depth: f64,
    /// Polarization angle, degrees.
    pub theta_deg: f64,
    /// Electric dipole moment, mV.
    pub k: f64,
    /// Shape factor.
    pub q: f64,
    /// Anomaly origin, m.
    pub r0: f64,
}

impl SpParams {
    pub const DEPTH: (f64, f64) = (1.0, 8.0);
    pub const THETA_DEG: (f64, f64) = (25.0, 75.0);
    pub const K: (f64, f64) = (-1000.0, 1000.0);
    pub const Q: (f64, f64) = (0.5, 1.5);
    pub const R0: (f64, f64) = (-5.0, 5.0);

    pub fn sample<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        SpParams {
            depth: uniform(rng, Self::DEPTH.0, Self::DEPTH.1),
            theta_deg: uniform(rng, Self::THETA_DEG.0, Self::THETA_DEG.1),
            k: uniform(rng, Self::K.0, Self::K.1),
            q: uniform(rng, Self::Q.0, Self::Q.1),
            r0: uniform(rng, Self::R0.0, Self::R0.1),
        }
    }

    pub fn in_range(&self) -> bool {
        let inside = |v: f64, r: (f64, f64)| (r.0..=r.1).contains(&v);
        inside(self.depth, Self::DEPTH)
            && inside(self.theta_deg, Self::THETA_DEG)
            && inside(self.k, Self::K)
            && inside(self.q, Self::Q)
            && inside(self.r0, Self::R0)
    }
}

/// Station positions `-20, -17.5, .., 20` m.
pub fn sp_grid() -> [f64; SP_POINTS] {
    core::array::from_fn(|i| -20.0 + 2.5 * i as f64)
}

/// `V(r) = K [(r - r0) cos(theta) + d sin(theta)] / ((r - r0)^2 + d^2)^q`.
pub fn sp_potential(p: &SpParams, r: f64) -> f64 {
    let theta = p.theta_deg.to_radians();
    let dr = r - p.r0;
    p.k * (dr * libm::cos(theta) + p.depth * libm::sin(theta)) / libm::pow(dr * dr + p.depth * p.depth, p.q)
}

/// [`sp_potential`] on the survey grid.
pub fn sp_anomaly(p: SpParams) -> [f64; SP_POINTS] {
    sp_grid().map(|r| sp_potential(&p, r))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpDatasetConfig {
    pub count: usize,
    pub noisy_fraction: f64,
    /// Uniform noise bound, `u ~ U[-level, level]`.
    pub level: f64,
    /// Share of the grid points that are corrupted in a noisy sample.
    pub noisy_point_fraction: f64,
}

impl SpDatasetConfig {
    /// Two thirds noisy, up to 50% noise on half the stations.
    pub fn training(count: usize) -> Self {
        SpDatasetConfig { count, noisy_fraction: 2.0 / 3.0, level: 0.5, noisy_point_fraction: 0.5 }
    }

    pub fn test(count: usize) -> Self {
        SpDatasetConfig { noisy_fraction: 1.0, ..SpDatasetConfig::training(count) }
    }
}

pub fn sp_dataset(config: &SpDatasetConfig, seed: u64) -> Result<SampleSet> {
    let points = crate::ceil_count(config.noisy_point_fraction, SP_POINTS);
    let mut set = SampleSet::new(SP_POINTS);
    for (i, mode) in noisy_plan(config.count, config.noisy_fraction, seed).into_iter().enumerate() {
        let mut rng = crate::rng_from_seed(derive_seed(seed, i as u64));
        let clean = sp_anomaly(SpParams::sample(&mut rng));
        match mode {
            Some(mode) => {
                let mut at: Vec<usize> = index::sample(&mut rng, SP_POINTS, points).into_vec();
                at.sort_unstable();
                let noisy = noise::add_noise_at(&clean, &at, config.level, mode, &mut rng);
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

    fn params() -> SpParams {
        SpParams { depth: 2.0, theta_deg: 45.0, k: 100.0, q: 1.0, r0: 0.0 }
    }

    #[test]
    fn grid() {
        let g = sp_grid();
        assert_eq!((g[0], g[8], g[16]), (-20.0, 0.0, 20.0));
    }

    #[test]
    fn scalar_evaluation() {
        let v = sp_potential(&params(), 2.0);
        let t = 45f64.to_radians();
        let expected = 100.0 * (2.0 * t.cos() + 2.0 * t.sin()) / 8.0;
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 35.355).abs() < 5e-4);
    }

    #[test]
    fn vertical_polarization_at_origin() {
        let v = sp_anomaly(SpParams { depth: 3.0, theta_deg: 90.0, k: 250.0, q: 0.5, r0: 0.0 });
        assert!((v[8] - 250.0).abs() < 1e-12);
    }

    #[test]
    fn zero_moment() {
        assert!(sp_anomaly(SpParams { k: 0.0, ..params() }).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn noisy_samples_touch_nine_points() {
        let set = sp_dataset(&SpDatasetConfig::test(50), 2).unwrap();
        for i in 0..set.len() {
            let changed = set.clean(i).iter().zip(set.corrupted(i)).filter(|(a, b)| a != b).count();
            assert!(changed <= 9);
        }
    }
}
