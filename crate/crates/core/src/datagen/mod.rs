//! Synthetic forward models and corruption injectors.
//!
//! Every factory takes an explicit seed; per-sample randomness is drawn from
//! `derive_seed(seed, index)` so samples can be generated in any order.

mod noise;
mod process;
mod rockphysics;
mod seismic;
mod sp;
mod welllog;

pub use noise::{add_noise_at, add_random_noise, add_random_noise_with, NoiseMode};
pub use process::{math_dataset, process_model, MathDatasetConfig, ProcessModelParams, PROCESS_POINTS};
pub use rockphysics::{rhg_velocity, RockConstants, HIGH_POROSITY, LOW_POROSITY};
pub use seismic::{
    corrupt_traces, monofrequency_trace, random_reflectors, ricker, seismic_patches, spaced_trace_indices,
    synth_seismic, Reflector, SeismicModel, SeismicPatchConfig, SeismicSection, TraceCorruption,
};
pub use sp::{sp_anomaly, sp_dataset, sp_grid, sp_potential, SpDatasetConfig, SpParams, SP_POINTS};
pub use welllog::{
    corrupt_well_column, corrupt_well_suite, synth_well_suite, well_images, CorruptionScope, LogColumn, LogScaling,
    LogSource, Placement, PropertyRanges, WellCorruption, WellImageConfig, WellLogSuite, MUTE_SENTINEL, WELL_LOGS,
};

use rand::Rng;

/// Uniform draw from a closed interval; returns `lo` for a degenerate one.
pub(crate) fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        lo
    } else {
        lo + (hi - lo) * rng.gen::<f64>()
    }
}
