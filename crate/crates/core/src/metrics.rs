//! Noise-reduction efficiency and region-split error reports.

use alloc::format;
use alloc::vec::Vec;

use crate::nn::SampleSet;
use crate::{Error, Result};

fn check_lengths(clean: &[f64], corrupted: &[f64], output: &[f64]) -> Result<()> {
    if clean.len() != corrupted.len() || clean.len() != output.len() {
        return Err(Error::shape(format!(
            "clean, corrupted and output lengths differ: {}, {}, {}",
            clean.len(),
            corrupted.len(),
            output.len()
        )));
    }
    Ok(())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `|z - x|^2 / |x~ - x|^2`: residual energy left relative to the noise put in.
pub fn residual_ratio(clean: &[f64], corrupted: &[f64], output: &[f64]) -> Result<f64> {
    check_lengths(clean, corrupted, output)?;
    let noise = sq_dist(corrupted, clean);
    if !(noise > 0.0) {
        return Err(Error::UndefinedMetric(format!("input noise energy is {noise}")));
    }
    Ok(sq_dist(output, clean) / noise)
}

/// Noise reduction in percent, `100 (1 - residual_ratio)`. 100 is perfect,
/// 0 means the output is no better than the input, negative is worse.
pub fn eta(clean: &[f64], corrupted: &[f64], output: &[f64]) -> Result<f64> {
    Ok(100.0 * (1.0 - residual_ratio(clean, corrupted, output)?))
}

pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::shape(format!("lengths differ: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::UndefinedMetric("mean of an empty set".into()));
    }
    Ok(sq_dist(a, b) / a.len() as f64)
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Evaluation summary. Region statistics are `None` when the region is empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub n_samples: usize,
    /// Efficiency of every sample that carried noise, in sample order.
    pub per_sample_eta: Vec<f64>,
    pub per_sample_ratio: Vec<f64>,
    pub mean_eta: Option<f64>,
    pub mse_clean_region: Option<f64>,
    pub mse_corrupt_region: Option<f64>,
    /// Largest `|output - input|` among cells that were not corrupted.
    pub max_clean_change: Option<f64>,
}

#[derive(Default)]
struct RegionAccumulator {
    clean_sq: f64,
    clean_n: usize,
    corrupt_sq: f64,
    corrupt_n: usize,
    max_clean_change: Option<f64>,
}

impl RegionAccumulator {
    fn add(&mut self, x: f64, xt: f64, z: f64, masked: bool) {
        let e = (z - x) * (z - x);
        if masked {
            self.corrupt_sq += e;
            self.corrupt_n += 1;
        } else {
            self.clean_sq += e;
            self.clean_n += 1;
            let change = (z - xt).abs();
            self.max_clean_change = Some(self.max_clean_change.map_or(change, |m: f64| m.max(change)));
        }
    }

    fn finish(self, report: &mut EvalReport) {
        let ratio = |s: f64, n: usize| if n == 0 { None } else { Some(s / n as f64) };
        report.mse_clean_region = ratio(self.clean_sq, self.clean_n);
        report.mse_corrupt_region = ratio(self.corrupt_sq, self.corrupt_n);
        report.max_clean_change = self.max_clean_change;
    }
}

/// Region split for a single record; `mask[i]` marks corrupted points.
pub fn region_report(clean: &[f64], corrupted: &[f64], output: &[f64], mask: &[bool]) -> Result<EvalReport> {
    check_lengths(clean, corrupted, output)?;
    if mask.len() != clean.len() {
        return Err(Error::shape(format!("mask has {} entries for {} values", mask.len(), clean.len())));
    }
    let mut acc = RegionAccumulator::default();
    for i in 0..clean.len() {
        acc.add(clean[i], corrupted[i], output[i], mask[i]);
    }
    let mut report = EvalReport { n_samples: 1, ..EvalReport::default() };
    if let Ok(r) = residual_ratio(clean, corrupted, output) {
        report.per_sample_ratio.push(r);
        report.per_sample_eta.push(100.0 * (1.0 - r));
    }
    report.mean_eta = mean(&report.per_sample_eta);
    acc.finish(&mut report);
    Ok(report)
}

/// Scores network `outputs` (row-major, one row per sample) against a set.
/// Efficiency is reported for samples whose corrupted input differs from the
/// clean one; the corrupt region is every cell where they differ.
pub fn evaluate_set(set: &SampleSet, outputs: &[f64]) -> Result<EvalReport> {
    let d = set.dim();
    if outputs.len() != set.len() * d {
        return Err(Error::shape(format!("expected {} outputs, got {}", set.len() * d, outputs.len())));
    }
    let mut report = EvalReport { n_samples: set.len(), ..EvalReport::default() };
    let mut acc = RegionAccumulator::default();
    for i in 0..set.len() {
        let (x, xt, z) = (set.clean(i), set.corrupted(i), &outputs[i * d..(i + 1) * d]);
        for k in 0..d {
            acc.add(x[k], xt[k], z[k], x[k] != xt[k]);
        }
        if let Ok(r) = residual_ratio(x, xt, z) {
            report.per_sample_ratio.push(r);
            report.per_sample_eta.push(100.0 * (1.0 - r));
        }
    }
    report.mean_eta = mean(&report.per_sample_eta);
    acc.finish(&mut report);
    Ok(report)
}

/// RMS error over masked cells divided by `range`; `None` if nothing is masked.
pub fn masked_normalized_rms(clean: &[f64], output: &[f64], mask: &[bool], range: f64) -> Result<Option<f64>> {
    if clean.len() != output.len() || clean.len() != mask.len() {
        return Err(Error::shape("clean, output and mask lengths differ"));
    }
    if !(range > 0.0) {
        return Err(Error::argument(format!("normalizing range must be > 0, got {range}")));
    }
    let (mut sq, mut n) = (0.0, 0usize);
    for ((x, z), &m) in clean.iter().zip(output).zip(mask) {
        if m {
            sq += (z - x) * (z - x);
            n += 1;
        }
    }
    Ok((n > 0).then(|| libm::sqrt(sq / n as f64) / range))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    const X: [f64; 4] = [1.0, -2.0, 0.5, 3.0];
    const XT: [f64; 4] = [1.4, -2.5, 0.1, 3.2];

    #[test]
    fn eta_fixed_points() {
        assert_eq!(eta(&X, &XT, &X).unwrap(), 100.0);
        assert_eq!(eta(&X, &XT, &XT).unwrap(), 0.0);
    }

    #[test]
    fn eta_quarter_residual() {
        let z: Vec<f64> = X.iter().zip(&XT).map(|(x, xt)| x + 0.5 * (xt - x)).collect();
        assert!((eta(&X, &XT, &z).unwrap() - 75.0).abs() < 1e-12);
    }

    #[test]
    fn eta_can_be_negative_and_needs_noise() {
        let z: Vec<f64> = X.iter().zip(&XT).map(|(x, xt)| x + 2.0 * (xt - x)).collect();
        assert!(eta(&X, &XT, &z).unwrap() < 0.0);
        assert!(matches!(eta(&X, &X, &XT), Err(Error::UndefinedMetric(_))));
        assert!(matches!(eta(&X, &XT[..3], &X), Err(Error::Shape(_))));
    }

    #[test]
    fn region_split() {
        let r = region_report(&X, &XT, &X, &[true, false, true, false]).unwrap();
        assert_eq!(r.mse_clean_region, Some(0.0));
        assert_eq!(r.mse_corrupt_region, Some(0.0));
        let r = region_report(&X, &XT, &XT, &[true; 4]).unwrap();
        assert_eq!(r.mse_clean_region, None);
        assert_eq!(r.max_clean_change, None);
        assert!(r.mse_corrupt_region.unwrap() > 0.0);
    }

    #[test]
    fn set_report_means() {
        let set =
            SampleSet::from_parts(2, vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 1.0, 2.0, 3.0], vec![true, false]).unwrap();
        let r = evaluate_set(&set, &[0.5, 1.0, 2.0, 3.1]).unwrap();
        assert_eq!(r.n_samples, 2);
        assert_eq!(r.per_sample_eta, vec![75.0]);
        assert_eq!(r.mean_eta, Some(75.0));
        assert_eq!(r.mse_corrupt_region, Some(0.25));
        assert!((r.max_clean_change.unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn masked_rms() {
        let v = masked_normalized_rms(&[0.0, 0.0], &[0.1, 5.0], &[true, false], 2.0).unwrap();
        assert!((v.unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(masked_normalized_rms(&[0.0], &[1.0], &[false], 1.0).unwrap(), None);
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
