use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use super::uniform;
use crate::nn::SampleSet;
use crate::{derive_seed, Error, Matrix, Result};

/// Zero-phase Ricker pulse with peak frequency `freq_hz`, evaluated at `t` seconds.
pub fn ricker(t: f64, freq_hz: f64) -> f64 {
    let a = PI * PI * freq_hz * freq_hz * t * t;
    (1.0 - 2.0 * a) * libm::exp(-a)
}

/// Amplitudes laid out `time_samples x traces`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeismicSection {
    amplitudes: Matrix,
    dt: f64,
    amax: f64,
}

impl SeismicSection {
    pub fn new(amplitudes: Matrix, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::argument(format!("sample interval must be > 0, got {dt}")));
        }
        let amax = amplitudes.max_abs();
        Ok(SeismicSection { amplitudes, dt, amax })
    }

    pub fn amplitudes(&self) -> &Matrix {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Matrix {
        self.amplitudes
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn amax(&self) -> f64 {
        self.amax
    }

    pub fn time_samples(&self) -> usize {
        self.amplitudes.rows()
    }

    pub fn traces(&self) -> usize {
        self.amplitudes.cols()
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    /// Copy rescaled so that `amax == 1` (unchanged if the section is all zero).
    pub fn normalized_to_peak(&self) -> SeismicSection {
        if self.amax == 0.0 {
            return self.clone();
        }
        let s = 1.0 / self.amax;
        SeismicSection { amplitudes: self.amplitudes.map(|v| v * s), dt: self.dt, amax: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflector {
    /// Two-way time at the first trace, in (fractional) samples.
    pub depth: f64,
    pub reflectivity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeismicModel {
    pub reflectors: Vec<Reflector>,
    pub wavelet_freq_hz: f64,
    pub dt: f64,
    pub time_samples: usize,
    pub traces: usize,
    /// Largest reflector slope in samples per trace; 0 gives flat layers.
    pub max_dip: f64,
    pub seed: u64,
}

/// Random reflector stack spread over (slightly beyond) `time_samples`.
pub fn random_reflectors(time_samples: usize, count: usize, seed: u64) -> Vec<Reflector> {
    let mut rng = crate::rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let depth = uniform(&mut rng, -3.0, time_samples as f64 + 3.0);
            let magnitude = uniform(&mut rng, 0.05, 0.3);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            Reflector { depth, reflectivity: sign * magnitude }
        })
        .collect()
}

/// Convolves laterally continuous, gently dipping reflectors with a Ricker
/// wavelet. Each reflector follows a planar dip plus a low-amplitude bend.
pub fn synth_seismic(model: &SeismicModel) -> Result<SeismicSection> {
    if model.time_samples == 0 || model.traces == 0 {
        return Err(Error::argument("section must have at least one sample and one trace"));
    }
    if !(model.dt > 0.0) || !(model.wavelet_freq_hz > 0.0) {
        return Err(Error::argument("sample interval and wavelet frequency must be > 0"));
    }
    if model.dt * model.wavelet_freq_hz >= 0.5 {
        return Err(Error::argument(format!(
            "{} Hz wavelet is at or above the {} Hz Nyquist frequency",
            model.wavelet_freq_hz,
            0.5 / model.dt
        )));
    }
    let mut rng = crate::rng_from_seed(model.seed);
    let dip = model.max_dip.abs();
    let regional = uniform(&mut rng, -dip, dip);
    let paths: Vec<(f64, f64, f64, f64, f64, f64)> = model
        .reflectors
        .iter()
        .map(|r| {
            let slope = (regional + uniform(&mut rng, -0.25, 0.25) * dip).clamp(-dip, dip);
            let bend = if dip > 0.0 { uniform(&mut rng, 0.0, 1.5) } else { 0.0 };
            let period = uniform(&mut rng, 30.0, 80.0);
            let phase = uniform(&mut rng, 0.0, 2.0 * PI);
            (r.depth, r.reflectivity, slope, bend, period, phase)
        })
        .collect();
    let mut amps = Matrix::zeros(model.time_samples, model.traces);
    for j in 0..model.traces {
        let x = j as f64;
        for &(depth, refl, slope, bend, period, phase) in &paths {
            let tau = depth + slope * x + bend * libm::sin(2.0 * PI * x / period + phase);
            for i in 0..model.time_samples {
                let v = amps.get(i, j) + refl * ricker((i as f64 - tau) * model.dt, model.wavelet_freq_hz);
                amps.set(i, j, v);
            }
        }
    }
    SeismicSection::new(amps, model.dt)
}

/// `amplitude * sin(2 pi f k dt)` for `k = 0..len`.
pub fn monofrequency_trace(len: usize, freq_hz: f64, amplitude: f64, dt: f64) -> Vec<f64> {
    (0..len).map(|k| amplitude * libm::sin(2.0 * PI * freq_hz * k as f64 * dt)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCorruption {
    pub trace: usize,
    pub freq_hz: f64,
    pub amplitude: f64,
}

fn check_band(fmin: f64, fmax: f64, nyquist: f64) -> Result<()> {
    if !(fmin > 0.0 && fmin <= fmax && fmax < nyquist) {
        return Err(Error::argument(format!("corruption band {fmin}-{fmax} Hz must lie inside (0, {nyquist}) Hz")));
    }
    Ok(())
}

/// Replaces each listed trace with a single-frequency sinusoid, frequency in
/// `[fmin, fmax]` and amplitude in `[amax / 2, amax]` of the input section.
pub fn corrupt_traces(
    section: &SeismicSection,
    traces: &[usize],
    fmin_hz: f64,
    fmax_hz: f64,
    seed: u64,
) -> Result<(SeismicSection, Vec<TraceCorruption>)> {
    check_band(fmin_hz, fmax_hz, section.nyquist())?;
    if let Some(&bad) = traces.iter().find(|&&t| t >= section.traces()) {
        return Err(Error::argument(format!("trace {bad} out of range for {} traces", section.traces())));
    }
    let mut amps = section.amplitudes.clone();
    let mut log = Vec::with_capacity(traces.len());
    for (n, &t) in traces.iter().enumerate() {
        let mut rng = crate::rng_from_seed(derive_seed(seed, n as u64));
        let freq_hz = uniform(&mut rng, fmin_hz, fmax_hz);
        let amplitude = uniform(&mut rng, 0.5 * section.amax, section.amax);
        for (k, v) in
            monofrequency_trace(section.time_samples(), freq_hz, amplitude, section.dt).into_iter().enumerate()
        {
            amps.set(k, t, v);
        }
        log.push(TraceCorruption { trace: t, freq_hz, amplitude });
    }
    Ok((SeismicSection::new(amps, section.dt)?, log))
}

/// `count` distinct trace indices in `0..traces`, pairwise at least `min_gap` apart.
pub fn spaced_trace_indices(traces: usize, count: usize, min_gap: usize, seed: u64) -> Result<Vec<usize>> {
    let mut rng = crate::rng_from_seed(seed);
    for _ in 0..10_000 {
        let mut picked: Vec<usize> = Vec::with_capacity(count);
        for _ in 0..count * 50 {
            if picked.len() == count {
                break;
            }
            let t = rng.gen_range(0..traces.max(1));
            if picked.iter().all(|&p| p.abs_diff(t) >= min_gap.max(1)) {
                picked.push(t);
            }
        }
        if picked.len() == count {
            picked.sort_unstable();
            return Ok(picked);
        }
    }
    Err(Error::argument(format!("cannot place {count} traces {min_gap} apart among {traces}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeismicPatchConfig {
    pub clean_patches: usize,
    pub noisy_per_clean: usize,
    pub patch_rows: usize,
    pub patch_cols: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
}

/// Random `patch_rows x patch_cols` windows cut from `sections`. Every clean
/// window contributes itself as a clean pair plus `noisy_per_clean` copies
/// with one trace replaced by a sinusoid. The result is shuffled.
pub fn seismic_patches(sections: &[SeismicSection], config: &SeismicPatchConfig, seed: u64) -> Result<SampleSet> {
    let (pr, pc) = (config.patch_rows, config.patch_cols);
    if sections.is_empty() || pr == 0 || pc == 0 {
        return Err(Error::argument("need at least one section and a nonempty patch shape"));
    }
    for s in sections {
        if s.time_samples() < pr || s.traces() < pc {
            return Err(Error::argument(format!(
                "{pr}x{pc} patch does not fit a {}x{} section",
                s.time_samples(),
                s.traces()
            )));
        }
        check_band(config.fmin_hz, config.fmax_hz, s.nyquist())?;
    }
    let mut set = SampleSet::with_shape(pr, pc);
    let mut patch = alloc::vec![0.0; pr * pc];
    let mut noisy = alloc::vec![0.0; pr * pc];
    for i in 0..config.clean_patches {
        let mut rng = crate::rng_from_seed(derive_seed(seed, i as u64));
        let s = &sections[rng.gen_range(0..sections.len())];
        let r0 = rng.gen_range(0..=s.time_samples() - pr);
        let c0 = rng.gen_range(0..=s.traces() - pc);
        for r in 0..pr {
            patch[r * pc..(r + 1) * pc].copy_from_slice(&s.amplitudes.row(r0 + r)[c0..c0 + pc]);
        }
        set.push(&patch, &patch, false)?;
        for _ in 0..config.noisy_per_clean {
            noisy.copy_from_slice(&patch);
            let col = rng.gen_range(0..pc);
            let freq = uniform(&mut rng, config.fmin_hz, config.fmax_hz);
            let amp = uniform(&mut rng, 0.5 * s.amax, s.amax);
            for r in 0..pr {
                noisy[r * pc + col] = amp * libm::sin(2.0 * PI * freq * (r0 + r) as f64 * s.dt);
            }
            set.push(&patch, &noisy, true)?;
        }
    }
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.shuffle(&mut crate::rng_from_seed(derive_seed(seed, u64::MAX)));
    set.subset(&order).reshaped(pr, pc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn model(reflectors: Vec<Reflector>, dip: f64) -> SeismicModel {
        SeismicModel {
            reflectors,
            wavelet_freq_hz: 40.0,
            dt: 0.002,
            time_samples: 99,
            traces: 42,
            max_dip: dip,
            seed: 5,
        }
    }

    #[test]
    fn zero_reflectivity_is_silent() {
        let s = synth_seismic(&model(vec![Reflector { depth: 20.0, reflectivity: 0.0 }], 0.3)).unwrap();
        assert_eq!(s.amax(), 0.0);
    }

    #[test]
    fn flat_single_reflector_traces_identical() {
        let s = synth_seismic(&model(vec![Reflector { depth: 40.3, reflectivity: 0.2 }], 0.0)).unwrap();
        let first = s.amplitudes().column(0);
        for j in 1..s.traces() {
            assert_eq!(s.amplitudes().column(j), first);
        }
        assert!(s.amax() > 0.0);
    }

    #[test]
    fn nyquist_violation_rejected() {
        let mut m = model(vec![], 0.0);
        m.wavelet_freq_hz = 300.0;
        assert!(matches!(synth_seismic(&m), Err(Error::Argument(_))));
    }

    #[test]
    fn default_section_autocorrelation_peaks_at_zero_lag() {
        let s = synth_seismic(&model(random_reflectors(99, 8, 1), 0.3)).unwrap();
        assert!(s.amax() > 0.0);
        let a = s.amplitudes();
        for j in 0..s.traces() {
            let tr = a.column(j);
            let ac = |lag: usize| tr.iter().zip(&tr[lag..]).map(|(x, y)| x * y).sum::<f64>();
            let zero = ac(0);
            for lag in 1..tr.len() {
                assert!(ac(lag) <= zero);
            }
        }
    }

    #[test]
    fn sinusoid_sample_value() {
        let tr = monofrequency_trace(4, 125.0, 1.0, 0.002);
        assert!((tr[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn corruption_amplitude_range_and_bounds() {
        let s = synth_seismic(&model(random_reflectors(99, 8, 2), 0.3)).unwrap();
        let (same, log) = corrupt_traces(&s, &[], 100.0, 220.0, 1).unwrap();
        assert_eq!(same, s);
        assert!(log.is_empty());
        let (c, log) = corrupt_traces(&s, &[7], 100.0, 220.0, 1).unwrap();
        assert!(log[0].amplitude >= 0.5 * s.amax() && log[0].amplitude <= s.amax());
        let peak = c.amplitudes().column(7).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak <= s.amax());
        assert!(corrupt_traces(&s, &[42], 100.0, 220.0, 1).is_err());
        assert!(corrupt_traces(&s, &[1], 100.0, 260.0, 1).is_err());
    }

    #[test]
    fn patches_are_clean_or_single_trace_corrupted() {
        let s = synth_seismic(&model(random_reflectors(99, 8, 3), 0.3)).unwrap();
        let cfg = SeismicPatchConfig {
            clean_patches: 20,
            noisy_per_clean: 2,
            patch_rows: 10,
            patch_cols: 5,
            fmin_hz: 100.0,
            fmax_hz: 220.0,
        };
        let set = seismic_patches(&[s], &cfg, 4).unwrap();
        assert_eq!(set.len(), 60);
        assert_eq!(set.noisy_count(), 40);
        assert_eq!(set.shape(), (10, 5));
        for i in 0..set.len() {
            let cols: std::collections::BTreeSet<usize> =
                (0..50).filter(|&k| set.clean(i)[k] != set.corrupted(i)[k]).map(|k| k % 5).collect();
            assert!(cols.len() <= 1);
        }
    }
}
